#!/usr/bin/env node
/** scene-ingest: turn per-frame vision artifacts into the scene JSON the
 *  beamtwin simulator consumes.
 *
 *  Usage:
 *    scene-ingest --fixture DIR --ue-gps LAT,LON --out scene.json
 *                 [--intrinsics intr.json] [--georef geo.json]
 *                 [--min-mask-pixels 20] [--pixel-iou]
 *    scene-ingest --image FILE ...   (requires a registered model backend)
 *
 *  Exit codes: 0 ok, 1 usage/config error, 2 data/backend error.
 */
import * as fs from "node:fs";
import * as path from "node:path";

import { makeIntrinsics } from "./camera.js";
import { fixtureBackend } from "./backend.js";
import { buildScene, sceneToJson } from "./scene.js";
import {
  BackendError,
  ConfigError,
  DataFormatError,
  GeoRef,
  georefFileSchema,
  intrinsicsFileSchema,
} from "./types.js";

type Args = Record<string, string | boolean>;

const FLAGS_WITH_VALUE = new Set([
  "--fixture",
  "--image",
  "--intrinsics",
  "--georef",
  "--ue-gps",
  "--out",
  "--min-mask-pixels",
]);
const BOOL_FLAGS = new Set(["--pixel-iou", "--help"]);

function parseArgs(argv: string[]): Args {
  const args: Args = {};
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    if (BOOL_FLAGS.has(flag)) {
      args[flag.slice(2)] = true;
    } else if (FLAGS_WITH_VALUE.has(flag)) {
      const value = argv[i + 1];
      if (value === undefined) throw new ConfigError(`${flag} needs a value`);
      args[flag.slice(2)] = value;
      i += 1;
    } else {
      throw new ConfigError(`unknown flag ${flag}`);
    }
  }
  return args;
}

function usage(): string {
  return "usage: scene-ingest --fixture DIR --ue-gps LAT,LON --out scene.json [--intrinsics intr.json] [--georef geo.json] [--min-mask-pixels N] [--pixel-iou]";
}

function loadJson(file: string): unknown {
  try {
    return JSON.parse(fs.readFileSync(file, "utf-8"));
  } catch (err) {
    throw new DataFormatError(`${file}: ${err}`);
  }
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`scene-ingest: ${(err as Error).message}`);
    console.error(usage());
    return 1;
  }
  if (args["help"]) {
    console.log(usage());
    return 0;
  }
  try {
    if (!args["out"]) throw new ConfigError("--out is required");
    if (!args["ue-gps"]) throw new ConfigError("--ue-gps LAT,LON is required");
    if (!!args["fixture"] === !!args["image"]) {
      throw new ConfigError("exactly one of --fixture or --image is required");
    }
    if (args["image"]) {
      throw new BackendError(
        "no model backend is configured for --image; precompute artifacts and use --fixture",
      );
    }

    const gpsParts = String(args["ue-gps"]).split(",").map(Number);
    if (gpsParts.length !== 2 || gpsParts.some((v) => !Number.isFinite(v))) {
      throw new ConfigError(`--ue-gps must be LAT,LON, got ${args["ue-gps"]}`);
    }

    const intrDoc = args["intrinsics"]
      ? intrinsicsFileSchema.parse(loadJson(String(args["intrinsics"])))
      : intrinsicsFileSchema.parse({});
    const intr = makeIntrinsics(
      intrDoc.width,
      intrDoc.height,
      intrDoc.horizontal_fov_deg,
      intrDoc.camera_height_m,
    );

    let georef: GeoRef = { origin_lat: 0, origin_lon: 0, camera_yaw_deg: 0 };
    if (args["georef"]) {
      georef = georefFileSchema.parse(loadJson(String(args["georef"])));
    }

    const minMaskPixels = args["min-mask-pixels"]
      ? Number(args["min-mask-pixels"])
      : undefined;
    if (minMaskPixels !== undefined && !(minMaskPixels >= 0)) {
      throw new ConfigError(`--min-mask-pixels must be >= 0`);
    }

    const artifacts = fixtureBackend.load(String(args["fixture"]));
    const { scene, warnings } = buildScene(
      artifacts,
      intr,
      { lat: gpsParts[0], lon: gpsParts[1] },
      georef,
      { minMaskPixels, pixelIou: Boolean(args["pixel-iou"]) },
    );
    for (const warning of warnings) {
      console.error(`scene-ingest: warning: ${warning}`);
    }

    const out = String(args["out"]);
    const tmp = path.join(path.dirname(out), `.${path.basename(out)}.tmp`);
    fs.writeFileSync(tmp, sceneToJson(scene));
    fs.renameSync(tmp, out);
    return 0;
  } catch (err) {
    if (err instanceof ConfigError) {
      console.error(`scene-ingest: configuration error: ${err.message}`);
      return 1;
    }
    if (err instanceof DataFormatError || err instanceof BackendError) {
      console.error(`scene-ingest: data error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("scene-ingest")) {
  process.exit(run(process.argv.slice(2)));
}
