import { Vec3 } from "./camera.js";
import { DataFormatError, GeoRef } from "./types.js";

const EARTH_RADIUS_M = 6371000.0;
const toRadians = (deg: number): number => (deg * Math.PI) / 180;

/** GPS to camera-frame ground-plane position (y = 0): equirectangular
 *  offsets around the origin, rotated by the camera yaw (bearing of the
 *  optical axis, clockwise from north). Mirrors the simulator's transform. */
export function gpsToCameraFrame(lat: number, lon: number, ref: GeoRef): Vec3 {
  if (lat < -90 || lat > 90) {
    throw new DataFormatError(`latitude outside [-90, 90]: ${lat}`);
  }
  if (lon < -180 || lon > 180) {
    throw new DataFormatError(`longitude outside [-180, 180]: ${lon}`);
  }
  const north = EARTH_RADIUS_M * toRadians(lat - ref.origin_lat);
  const east =
    EARTH_RADIUS_M * Math.cos(toRadians(ref.origin_lat)) * toRadians(lon - ref.origin_lon);
  const yaw = toRadians(ref.camera_yaw_deg ?? 0);
  const z = east * Math.sin(yaw) + north * Math.cos(yaw);
  const x = east * Math.cos(yaw) - north * Math.sin(yaw);
  return [x, 0, z];
}
