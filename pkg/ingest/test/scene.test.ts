import { describe, expect, it } from "vitest";

import { makeIntrinsics, pixelsToPoints, pointFromPixel } from "../src/camera.js";
import { gpsToCameraFrame } from "../src/geo.js";
import { buildScene, objectPosition, sceneToJson } from "../src/scene.js";
import { sceneSchema, DepthGrid, FrameArtifacts, ObjectMask } from "../src/types.js";

const INTR = makeIntrinsics(96, 54, 110);
const GEOREF = { origin_lat: 40.0, origin_lon: -105.0, camera_yaw_deg: 0.0 };

function constantDepth(value: number, w = 96, h = 54): DepthGrid {
  return { width: w, height: h, values: new Float32Array(w * h).fill(value) };
}

function maskOf(pixels: Array<[number, number]>, w = 96, h = 54, id = "m0"): ObjectMask {
  const buf = new Uint8Array(w * h);
  for (const [u, v] of pixels) buf[v * w + u] = 1;
  return { id, width: w, height: h, pixels: buf };
}

describe("objectPosition", () => {
  it("returns the single pixel's point for a one-pixel mask", () => {
    const mask = maskOf([[48, 27]]);
    const got = objectPosition(mask, constantDepth(10), INTR)!;
    expect(got).toEqual(pointFromPixel(48, 27, 10, INTR));
    expect(got[2]).toBe(10);
  });

  it("averages componentwise", () => {
    // two pixels symmetric about the principal point at the same depth
    const mask = maskOf([
      [38, 27],
      [58, 27],
    ]);
    const got = objectPosition(mask, constantDepth(10), INTR)!;
    expect(got[0]).toBeCloseTo(0, 12);
    expect(got[1]).toBeCloseTo(0, 12);
    expect(got[2]).toBeCloseTo(10, 12);
  });

  it("matches a naive accumulation loop on a random mask", () => {
    const rng = (() => {
      let s = 1234;
      return () => ((s = (s * 1103515245 + 12345) % 2 ** 31) / 2 ** 31);
    })();
    const pix: Array<[number, number]> = [];
    const depth = constantDepth(0);
    for (let i = 0; i < 300; i++) {
      const u = Math.floor(rng() * 96);
      const v = Math.floor(rng() * 54);
      pix.push([u, v]);
      depth.values[v * 96 + u] = 4 + 10 * rng();
    }
    const mask = maskOf(pix);
    const got = objectPosition(mask, depth, INTR)!;
    // naive route: full point cloud first, then accumulate over the mask
    const points = pixelsToPoints(depth, INTR);
    let sx = 0,
      sy = 0,
      sz = 0,
      n = 0;
    for (let i = 0; i < mask.pixels.length; i++) {
      if (!mask.pixels[i]) continue;
      const p = points[i];
      if (!p) continue;
      sx += p[0];
      sy += p[1];
      sz += p[2];
      n += 1;
    }
    expect(got[0]).toBeCloseTo(sx / n, 12);
    expect(got[1]).toBeCloseTo(sy / n, 12);
    expect(got[2]).toBeCloseTo(sz / n, 12);
  });

  it("excludes zero and negative depths", () => {
    const depth = constantDepth(10);
    depth.values[27 * 96 + 40] = 0;
    depth.values[27 * 96 + 41] = -3;
    const mask = maskOf([
      [40, 27],
      [41, 27],
      [42, 27],
    ]);
    const got = objectPosition(mask, depth, INTR)!;
    expect(got).toEqual(pointFromPixel(42, 27, 10, INTR));
  });

  it("is null when no pixel has valid depth", () => {
    expect(objectPosition(maskOf([[5, 5]]), constantDepth(0), INTR)).toBeNull();
  });
});

describe("buildScene", () => {
  const carMask = maskOf(
    Array.from({ length: 25 }, (_, i) => [44 + (i % 5), 25 + Math.floor(i / 5)]),
  );

  function artifacts(masks: ObjectMask[], depth = constantDepth(10)): FrameArtifacts {
    return {
      depth,
      masks,
      detections: [{ class: "car", box: [44, 25, 5, 5], confidence: 0.9 }],
    };
  }

  it("emits one reflector per usable mask with the class reflectance", () => {
    const { scene, warnings } = buildScene(
      artifacts([carMask]),
      INTR,
      { lat: 40.0002, lon: -105.0 },
      GEOREF,
    );
    expect(warnings).toEqual([]);
    expect(scene.objects).toHaveLength(1);
    expect(scene.objects[0].class).toBe("car");
    expect(scene.objects[0].reflectance).toBe(1.0);
    expect(scene.objects[0].position[2]).toBeCloseTo(10, 9);
    expect(scene.ue.reflector_id).toBe("m0");
    expect(sceneSchema.safeParse(scene).success).toBe(true);
  });

  it("zero masks still gives a valid scene with only the UE", () => {
    const { scene } = buildScene(artifacts([]), INTR, { lat: 40.0002, lon: -105.0 }, GEOREF);
    expect(scene.objects).toEqual([]);
    expect(scene.ue.reflector_id).toBeUndefined();
    expect(sceneSchema.safeParse(scene).success).toBe(true);
  });

  it("skips tiny masks with a warning", () => {
    const tiny = maskOf([[4, 4]], 96, 54, "noise");
    const { scene, warnings } = buildScene(
      artifacts([tiny, carMask]),
      INTR,
      { lat: 40.0002, lon: -105.0 },
      GEOREF,
    );
    expect(scene.objects.map((o) => o.id)).toEqual(["m0"]);
    expect(warnings.some((w) => w.includes("noise"))).toBe(true);
  });

  it("labels unmatched masks unknown with the default reflectance", () => {
    const offMask = maskOf(
      Array.from({ length: 25 }, (_, i) => [5 + (i % 5), 5 + Math.floor(i / 5)]),
      96,
      54,
      "mystery",
    );
    const { scene } = buildScene(
      artifacts([offMask]),
      INTR,
      { lat: 40.0002, lon: -105.0 },
      GEOREF,
    );
    expect(scene.objects[0].class).toBe("unknown");
    expect(scene.objects[0].reflectance).toBe(0.5);
  });

  it("flags the reflector nearest the UE GPS position", () => {
    const near = maskOf(
      Array.from({ length: 25 }, (_, i) => [44 + (i % 5), 25 + Math.floor(i / 5)]),
      96,
      54,
      "near",
    );
    const farDepth = constantDepth(10);
    const farPix: Array<[number, number]> = Array.from({ length: 25 }, (_, i) => [
      70 + (i % 5),
      25 + Math.floor(i / 5),
    ]);
    for (const [u, v] of farPix) farDepth.values[v * 96 + u] = 40;
    const far = { ...maskOf(farPix, 96, 54, "far") };
    const { scene } = buildScene(
      { depth: farDepth, masks: [far, near], detections: [] },
      INTR,
      { lat: 40.00009, lon: -105.0 }, // ~10 m ahead
      GEOREF,
    );
    expect(scene.ue.reflector_id).toBe("near");
  });
});

describe("gpsToCameraFrame", () => {
  it("maps north to +z for a north-facing camera", () => {
    const pos = gpsToCameraFrame(40.0 + (100 / 6371000) * (180 / Math.PI), -105.0, GEOREF);
    expect(Math.abs(pos[0])).toBeLessThan(0.1);
    expect(Math.abs(pos[2] - 100)).toBeLessThan(0.1);
  });

  it("rotates with the camera yaw", () => {
    const ref = { ...GEOREF, camera_yaw_deg: 90.0 };
    const pos = gpsToCameraFrame(40.0 + (100 / 6371000) * (180 / Math.PI), -105.0, ref);
    expect(Math.abs(pos[0] + 100)).toBeLessThan(0.1);
    expect(Math.abs(pos[2])).toBeLessThan(0.1);
  });
});

describe("sceneToJson", () => {
  it("is deterministic with sorted keys", () => {
    const { scene } = buildScene(
      { depth: constantDepth(10), masks: [], detections: [] },
      INTR,
      { lat: 40.0002, lon: -105.0 },
      GEOREF,
    );
    const a = sceneToJson(scene);
    const b = sceneToJson(JSON.parse(JSON.stringify(scene)));
    expect(a).toBe(b);
    expect(a.endsWith("\n")).toBe(true);
    const keys = Object.keys(JSON.parse(a));
    expect(keys).toEqual([...keys].sort());
  });
});
