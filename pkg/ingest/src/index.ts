export {
  azimuthOf,
  makeIntrinsics,
  pixelToRay,
  pixelsToPoints,
  pointFromPixel,
  project,
} from "./camera.js";
export type { CameraIntrinsics } from "./types.js";
export type { Vec3 } from "./camera.js";
export { gpsToCameraFrame } from "./geo.js";
export { IOU_THRESHOLD, iou, maskBoundingBox, matchClass } from "./matching.js";
export type { Box } from "./matching.js";
export {
  loadFixtureArtifacts,
  readDepthGrid,
  readDetections,
  readMaskPng,
  writeDepthGrid,
  writeMaskPng,
} from "./fixture.js";
export { fixtureBackend, getBackend, registerBackend } from "./backend.js";
export type { Backend } from "./backend.js";
export {
  MIN_MASK_PIXELS,
  buildScene,
  objectPosition,
  sceneToJson,
} from "./scene.js";
export type { BuildOptions, BuildResult } from "./scene.js";
export {
  BackendError,
  CLASS_REFLECTANCE,
  ConfigError,
  DEFAULT_REFLECTANCE,
  DataFormatError,
  detectionsFileSchema,
  georefFileSchema,
  intrinsicsFileSchema,
  reflectanceForClass,
  sceneSchema,
} from "./types.js";
export type {
  DepthGrid,
  Detection,
  FrameArtifacts,
  GeoRef,
  ObjectMask,
  SceneDocument,
} from "./types.js";
export { run } from "./cli.js";
