import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import {
  loadFixtureArtifacts,
  readDepthGrid,
  readDetections,
  readMaskPng,
  writeDepthGrid,
  writeMaskPng,
} from "../src/fixture.js";
import { DataFormatError, ObjectMask } from "../src/types.js";

let tmp: string;
beforeEach(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), "ingest-test-"));
});
afterEach(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

describe("depth grid", () => {
  it("round trips float32 values exactly", () => {
    const values = new Float32Array(12 * 5);
    for (let i = 0; i < values.length; i++) values[i] = Math.fround(0.37 * i - 3);
    const file = path.join(tmp, "depth.bin");
    writeDepthGrid(file, { width: 12, height: 5, values });
    const back = readDepthGrid(file);
    expect(back.width).toBe(12);
    expect(back.height).toBe(5);
    expect([...back.values]).toEqual([...values]);
  });

  it("rejects truncated payloads and foreign headers", () => {
    const file = path.join(tmp, "depth.bin");
    writeDepthGrid(file, { width: 4, height: 4, values: new Float32Array(16) });
    fs.writeFileSync(file, fs.readFileSync(file).subarray(0, 40));
    expect(() => readDepthGrid(file)).toThrow(DataFormatError);
    fs.writeFileSync(path.join(tmp, "other.bin"), '{"format":"something"}\n');
    expect(() => readDepthGrid(path.join(tmp, "other.bin"))).toThrow(DataFormatError);
  });
});

describe("mask png", () => {
  it("round trips the bitmap", () => {
    const pixels = new Uint8Array(8 * 6);
    pixels[9] = 1;
    pixels[22] = 1;
    const mask: ObjectMask = { id: "x", width: 8, height: 6, pixels };
    const file = path.join(tmp, "m7.png");
    writeMaskPng(file, mask);
    const back = readMaskPng(file);
    expect(back.id).toBe("m7");
    expect([...back.pixels]).toEqual([...pixels]);
  });
});

describe("detections", () => {
  it("parses a valid file and rejects malformed ones", () => {
    const file = path.join(tmp, "detections.json");
    fs.writeFileSync(
      file,
      JSON.stringify({ detections: [{ class: "car", box: [1, 2, 3, 4], confidence: 0.5 }] }),
    );
    expect(readDetections(file)).toHaveLength(1);
    fs.writeFileSync(file, JSON.stringify({ detections: [{ class: "car" }] }));
    expect(() => readDetections(file)).toThrow(DataFormatError);
    fs.writeFileSync(file, "not json");
    expect(() => readDetections(file)).toThrow(DataFormatError);
  });
});

describe("loadFixtureArtifacts", () => {
  it("reports missing pieces", () => {
    expect(() => loadFixtureArtifacts(tmp)).toThrow(/depth\.bin/);
    writeDepthGrid(path.join(tmp, "depth.bin"), {
      width: 4,
      height: 4,
      values: new Float32Array(16),
    });
    expect(() => loadFixtureArtifacts(tmp)).toThrow(/detections\.json/);
  });

  it("rejects masks whose size disagrees with the depth grid", () => {
    writeDepthGrid(path.join(tmp, "depth.bin"), {
      width: 4,
      height: 4,
      values: new Float32Array(16),
    });
    fs.writeFileSync(path.join(tmp, "detections.json"), JSON.stringify({ detections: [] }));
    fs.mkdirSync(path.join(tmp, "masks"));
    writeMaskPng(path.join(tmp, "masks", "bad.png"), {
      id: "bad",
      width: 5,
      height: 4,
      pixels: new Uint8Array(20),
    });
    expect(() => loadFixtureArtifacts(tmp)).toThrow(/bad\.png/);
  });

  it("loads the bundled demo fixture with sorted mask order", () => {
    const demo = fileURLToPath(new URL("../fixtures/demo", import.meta.url));
    const artifacts = loadFixtureArtifacts(demo);
    expect(artifacts.depth.width).toBe(96);
    expect(artifacts.masks.map((m) => m.id)).toEqual(["m0_left", "m1_mid", "m2_right"]);
    expect(artifacts.detections).toHaveLength(3);
  });
});
