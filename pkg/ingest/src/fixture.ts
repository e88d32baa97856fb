import * as fs from "node:fs";
import * as path from "node:path";
import { PNG } from "pngjs";

import {
  DataFormatError,
  DepthGrid,
  detectionsFileSchema,
  Detection,
  FrameArtifacts,
  ObjectMask,
} from "./types.js";

export const DEPTH_FORMAT = "beamtwin-depth";
export const DEPTH_VERSION = 1;

/** Portable float grid: one JSON header line, then row-major float32 LE.
 *  Header: {"format":"beamtwin-depth","version":1,"width":W,"height":H,"dtype":"<f4"} */
export function readDepthGrid(file: string): DepthGrid {
  const raw = fs.readFileSync(file);
  const newline = raw.indexOf(0x0a);
  if (newline < 0) throw new DataFormatError(`${file}: missing depth header line`);
  let header;
  try {
    header = JSON.parse(raw.subarray(0, newline).toString("utf-8"));
  } catch (err) {
    throw new DataFormatError(`${file}: bad depth header: ${err}`);
  }
  if (header.format !== DEPTH_FORMAT || header.version !== DEPTH_VERSION) {
    throw new DataFormatError(`${file}: not a version-${DEPTH_VERSION} depth grid`);
  }
  if (header.dtype !== "<f4") {
    throw new DataFormatError(`${file}: unsupported dtype ${header.dtype}`);
  }
  const width = header.width | 0;
  const height = header.height | 0;
  const body = raw.subarray(newline + 1);
  if (body.length !== width * height * 4) {
    throw new DataFormatError(
      `${file}: expected ${width * height * 4} payload bytes, got ${body.length}`,
    );
  }
  const values = new Float32Array(width * height);
  for (let i = 0; i < values.length; i++) {
    values[i] = body.readFloatLE(i * 4);
  }
  return { width, height, values };
}

export function writeDepthGrid(file: string, grid: DepthGrid): void {
  const header = JSON.stringify({
    format: DEPTH_FORMAT,
    version: DEPTH_VERSION,
    width: grid.width,
    height: grid.height,
    dtype: "<f4",
  });
  const body = Buffer.alloc(grid.values.length * 4);
  for (let i = 0; i < grid.values.length; i++) {
    body.writeFloatLE(grid.values[i], i * 4);
  }
  fs.writeFileSync(file, Buffer.concat([Buffer.from(header + "\n", "utf-8"), body]));
}

/** A mask PNG marks object pixels with any channel value > 127. */
export function readMaskPng(file: string): ObjectMask {
  const png = PNG.sync.read(fs.readFileSync(file));
  const pixels = new Uint8Array(png.width * png.height);
  for (let i = 0; i < pixels.length; i++) {
    const o = i * 4;
    pixels[i] =
      png.data[o] > 127 || png.data[o + 1] > 127 || png.data[o + 2] > 127 ? 1 : 0;
  }
  return {
    id: path.basename(file).replace(/\.png$/i, ""),
    width: png.width,
    height: png.height,
    pixels,
  };
}

export function writeMaskPng(file: string, mask: ObjectMask): void {
  const png = new PNG({ width: mask.width, height: mask.height });
  for (let i = 0; i < mask.pixels.length; i++) {
    const v = mask.pixels[i] ? 255 : 0;
    png.data[i * 4] = v;
    png.data[i * 4 + 1] = v;
    png.data[i * 4 + 2] = v;
    png.data[i * 4 + 3] = 255;
  }
  fs.writeFileSync(file, PNG.sync.write(png));
}

export function readDetections(file: string): Detection[] {
  let doc;
  try {
    doc = JSON.parse(fs.readFileSync(file, "utf-8"));
  } catch (err) {
    throw new DataFormatError(`${file}: invalid JSON: ${err}`);
  }
  const parsed = detectionsFileSchema.safeParse(doc);
  if (!parsed.success) {
    throw new DataFormatError(`${file}: ${parsed.error.message}`);
  }
  return parsed.data.detections;
}

/** Fixture backend: precomputed per-frame artifacts on disk.
 *  Layout: `depth.bin`, `masks/*.png` (sorted by name), `detections.json`. */
export function loadFixtureArtifacts(dir: string): FrameArtifacts {
  const depthFile = path.join(dir, "depth.bin");
  const masksDir = path.join(dir, "masks");
  const detectionsFile = path.join(dir, "detections.json");
  if (!fs.existsSync(depthFile)) {
    throw new DataFormatError(`fixture ${dir} is missing depth.bin`);
  }
  if (!fs.existsSync(detectionsFile)) {
    throw new DataFormatError(`fixture ${dir} is missing detections.json`);
  }
  const depth = readDepthGrid(depthFile);
  const masks: ObjectMask[] = [];
  if (fs.existsSync(masksDir)) {
    for (const name of fs.readdirSync(masksDir).sort()) {
      if (!name.toLowerCase().endsWith(".png")) continue;
      const mask = readMaskPng(path.join(masksDir, name));
      if (mask.width !== depth.width || mask.height !== depth.height) {
        throw new DataFormatError(
          `mask ${name} is ${mask.width}x${mask.height}, depth is ${depth.width}x${depth.height}`,
        );
      }
      masks.push(mask);
    }
  }
  return { depth, masks, detections: readDetections(detectionsFile) };
}
