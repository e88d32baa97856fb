import { z } from "zod";

/** Pinhole camera parameters; focal lengths and principal point are derived
 *  from the resolution and horizontal field of view. */
export type CameraIntrinsics = {
  width: number;
  height: number;
  horizontalFovDeg: number;
  cameraHeightM: number;
  fx: number;
  fy: number;
  cx: number;
  cy: number;
};

export const intrinsicsFileSchema = z.object({
  width: z.number().int().positive().default(960),
  height: z.number().int().positive().default(540),
  horizontal_fov_deg: z.number().gt(0).lt(180).default(110),
  camera_height_m: z.number().default(0),
});

export const georefFileSchema = z.object({
  origin_lat: z.number().min(-90).max(90),
  origin_lon: z.number().min(-180).max(180),
  camera_yaw_deg: z.number().default(0),
  origin_altitude: z.number().optional(),
});

export type GeoRef = z.infer<typeof georefFileSchema>;

export const detectionSchema = z.object({
  class: z.string(),
  /** [x, y, width, height] in pixels */
  box: z.tuple([z.number(), z.number(), z.number(), z.number()]),
  confidence: z.number().min(0).max(1),
});

export const detectionsFileSchema = z.object({
  detections: z.array(detectionSchema),
});

export type Detection = z.infer<typeof detectionSchema>;

export type DepthGrid = {
  width: number;
  height: number;
  /** row-major, width*height; values <= 0 mark invalid pixels */
  values: Float32Array;
};

export type ObjectMask = {
  id: string;
  width: number;
  height: number;
  /** row-major boolean bitmap */
  pixels: Uint8Array;
};

export type FrameArtifacts = {
  depth: DepthGrid;
  masks: ObjectMask[];
  detections: Detection[];
};

/** The scene JSON contract consumed by the beamtwin simulator. */
export const sceneSchema = z.object({
  grid_n_angles: z.literal(180),
  ue: z.object({
    position: z.tuple([z.number(), z.number(), z.number()]),
    reflector_id: z.string().optional(),
  }),
  objects: z.array(
    z.object({
      id: z.string(),
      class: z.string(),
      position: z.tuple([z.number(), z.number(), z.number()]),
      reflectance: z.number().min(0).max(1),
    }),
  ),
  georef: z
    .object({
      origin_lat: z.number(),
      origin_lon: z.number(),
      camera_yaw_deg: z.number(),
      origin_altitude: z.number().optional(),
    })
    .optional(),
});

export type SceneDocument = z.infer<typeof sceneSchema>;

/** Published per-class reflectances; anything else gets the default. */
export const CLASS_REFLECTANCE: Record<string, number> = {
  tree: 0.3,
  car: 1.0,
  pole: 0.6,
};
export const DEFAULT_REFLECTANCE = 0.5;

export const reflectanceForClass = (label: string): number =>
  CLASS_REFLECTANCE[label] ?? DEFAULT_REFLECTANCE;

export class ConfigError extends Error {}
export class DataFormatError extends Error {}
export class BackendError extends Error {}
