import { CameraIntrinsics, ConfigError, DepthGrid } from "./types.js";

export type { CameraIntrinsics } from "./types.js";

const toRadians = (deg: number): number => (deg * Math.PI) / 180;
const toDegrees = (rad: number): number => (rad * 180) / Math.PI;

/** Derive the full pinhole model from resolution and horizontal FOV:
 *  fx = (width/2) / tan(fov/2), fy = fx, principal point at the center. */
export function makeIntrinsics(
  width = 960,
  height = 540,
  horizontalFovDeg = 110,
  cameraHeightM = 0,
): CameraIntrinsics {
  if (width <= 0 || height <= 0) {
    throw new ConfigError(`invalid resolution ${width}x${height}`);
  }
  if (horizontalFovDeg <= 0 || horizontalFovDeg >= 180) {
    throw new ConfigError(`horizontal FOV must be in (0, 180), got ${horizontalFovDeg}`);
  }
  const fx = width / 2 / Math.tan(toRadians(horizontalFovDeg) / 2);
  return {
    width,
    height,
    horizontalFovDeg,
    cameraHeightM,
    fx,
    fy: fx,
    cx: width / 2,
    cy: height / 2,
  };
}

export type Vec3 = [number, number, number];

/** Unit ray through a pixel, camera frame (x right, y down, z forward). */
export function pixelToRay(u: number, v: number, intr: CameraIntrinsics): Vec3 {
  if (u < 0 || u >= intr.width || v < 0 || v >= intr.height) {
    throw new ConfigError(`pixel (${u}, ${v}) outside ${intr.width}x${intr.height}`);
  }
  const x = (u - intr.cx) / intr.fx;
  const y = (v - intr.cy) / intr.fy;
  const n = Math.hypot(x, y, 1);
  return [x / n, y / n, 1 / n];
}

/** 3D point of a pixel given its depth, scaled so that z equals the depth. */
export function pointFromPixel(
  u: number,
  v: number,
  depth: number,
  intr: CameraIntrinsics,
): Vec3 {
  return [((u - intr.cx) / intr.fx) * depth, ((v - intr.cy) / intr.fy) * depth, depth];
}

/** Back-project a whole depth map: row-major array of camera-frame points,
 *  null where the depth is missing (<= 0 or non-finite). */
export function pixelsToPoints(
  depth: DepthGrid,
  intr: CameraIntrinsics,
): Array<Vec3 | null> {
  const points: Array<Vec3 | null> = new Array(depth.width * depth.height);
  for (let v = 0; v < depth.height; v++) {
    for (let u = 0; u < depth.width; u++) {
      const d = depth.values[v * depth.width + u];
      points[v * depth.width + u] =
        d > 0 && Number.isFinite(d) ? pointFromPixel(u, v, d, intr) : null;
    }
  }
  return points;
}

/** Forward projection, the inverse of pointFromPixel / pixelToRay. */
export function project(point: Vec3, intr: CameraIntrinsics): [number, number] {
  const [x, y, z] = point;
  if (z <= 0) {
    throw new ConfigError(`cannot project a point with z <= 0 (z=${z})`);
  }
  return [intr.cx + (intr.fx * x) / z, intr.cy + (intr.fy * y) / z];
}

/** Azimuth of a camera-frame point in degrees: atan2(x, z), 0 on the optical
 *  axis, positive to the camera's right. Matches the simulator convention. */
export function azimuthOf(point: Vec3): number {
  const [x, , z] = point;
  if (x === 0 && z === 0) {
    throw new ConfigError("azimuth undefined at the camera origin");
  }
  return toDegrees(Math.atan2(x, z));
}
