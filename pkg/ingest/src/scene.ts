import { Vec3, pointFromPixel } from "./camera.js";
import { gpsToCameraFrame } from "./geo.js";
import { matchClass } from "./matching.js";
import {
  BackendError,
  CameraIntrinsics,
  DepthGrid,
  FrameArtifacts,
  GeoRef,
  ObjectMask,
  SceneDocument,
  reflectanceForClass,
  sceneSchema,
} from "./types.js";

/** Masks smaller than this are treated as segmentation noise. */
export const MIN_MASK_PIXELS = 20;

export type BuildOptions = {
  minMaskPixels?: number;
  pixelIou?: boolean;
};

export type BuildResult = {
  scene: SceneDocument;
  warnings: string[];
};

/** Componentwise mean 3D position of a mask's valid (depth > 0) pixels. */
export function objectPosition(
  mask: ObjectMask,
  depth: DepthGrid,
  intr: CameraIntrinsics,
): Vec3 | null {
  let sx = 0;
  let sy = 0;
  let sz = 0;
  let n = 0;
  for (let v = 0; v < mask.height; v++) {
    for (let u = 0; u < mask.width; u++) {
      if (!mask.pixels[v * mask.width + u]) continue;
      const d = depth.values[v * depth.width + u];
      if (!(d > 0) || !Number.isFinite(d)) continue;
      const [x, y, z] = pointFromPixel(u, v, d, intr);
      sx += x;
      sy += y;
      sz += z;
      n += 1;
    }
  }
  if (n === 0) return null;
  return [sx / n, sy / n, sz / n];
}

/** Assemble the scene document: one point reflector per usable mask, the UE
 *  position from GPS, and the reflector nearest the UE flagged as its own
 *  object. The output always validates against the scene schema. */
export function buildScene(
  artifacts: FrameArtifacts,
  intr: CameraIntrinsics,
  ueGps: { lat: number; lon: number },
  georef: GeoRef,
  options: BuildOptions = {},
): BuildResult {
  const minPixels = options.minMaskPixels ?? MIN_MASK_PIXELS;
  const warnings: string[] = [];
  const objects: SceneDocument["objects"] = [];

  for (const mask of artifacts.masks) {
    let count = 0;
    for (let i = 0; i < mask.pixels.length; i++) count += mask.pixels[i];
    if (count < minPixels) {
      warnings.push(`mask ${mask.id}: ${count} pixels below minimum ${minPixels}, skipped`);
      continue;
    }
    const position = objectPosition(mask, artifacts.depth, intr);
    if (!position) {
      warnings.push(`mask ${mask.id}: no valid depth pixels, skipped`);
      continue;
    }
    const label = matchClass(mask, artifacts.detections, options.pixelIou ?? false);
    objects.push({
      id: mask.id,
      class: label,
      position,
      reflectance: reflectanceForClass(label),
    });
  }

  const uePosition = gpsToCameraFrame(ueGps.lat, ueGps.lon, georef);
  const ue: SceneDocument["ue"] = { position: uePosition };
  if (objects.length > 0) {
    ue.reflector_id = nearestObjectId(objects, uePosition);
  }

  const scene: SceneDocument = {
    grid_n_angles: 180,
    ue,
    objects,
    georef: {
      origin_lat: georef.origin_lat,
      origin_lon: georef.origin_lon,
      camera_yaw_deg: georef.camera_yaw_deg ?? 0,
      ...(georef.origin_altitude !== undefined
        ? { origin_altitude: georef.origin_altitude }
        : {}),
    },
  };
  const checked = sceneSchema.safeParse(scene);
  if (!checked.success) {
    throw new BackendError(`emitted scene failed schema validation: ${checked.error.message}`);
  }
  return { scene: checked.data, warnings };
}

function nearestObjectId(objects: SceneDocument["objects"], ue: Vec3): string {
  let bestId = objects[0].id;
  let bestDist = Infinity;
  for (const obj of objects) {
    const dx = obj.position[0] - ue[0];
    const dy = obj.position[1] - ue[1];
    const dz = obj.position[2] - ue[2];
    const dist = Math.hypot(dx, dy, dz);
    if (dist < bestDist || (dist === bestDist && obj.id < bestId)) {
      bestDist = dist;
      bestId = obj.id;
    }
  }
  return bestId;
}

/** Deterministic serialization: sorted keys, two-space indent, newline. */
export function sceneToJson(scene: SceneDocument): string {
  return stableStringify(scene, 0) + "\n";
}

function stableStringify(value: unknown, depth: number): string {
  const pad = "  ".repeat(depth + 1);
  const close = "  ".repeat(depth);
  if (Array.isArray(value)) {
    if (value.length === 0) return "[]";
    const body = value.map((v) => pad + stableStringify(v, depth + 1)).join(",\n");
    return `[\n${body}\n${close}]`;
  }
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .filter(([, v]) => v !== undefined)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0));
    if (entries.length === 0) return "{}";
    const body = entries
      .map(([k, v]) => `${pad}${JSON.stringify(k)}: ${stableStringify(v, depth + 1)}`)
      .join(",\n");
    return `{\n${body}\n${close}}`;
  }
  return JSON.stringify(value);
}
