import { Detection, ObjectMask } from "./types.js";

/** [x, y, width, height] rectangle. */
export type Box = [number, number, number, number];

/** Below this overlap a mask gets no class from the detections. */
export const IOU_THRESHOLD = 0.1;

export function iou(a: Box, b: Box): number {
  const ax2 = a[0] + a[2];
  const ay2 = a[1] + a[3];
  const bx2 = b[0] + b[2];
  const by2 = b[1] + b[3];
  const iw = Math.max(0, Math.min(ax2, bx2) - Math.max(a[0], b[0]));
  const ih = Math.max(0, Math.min(ay2, by2) - Math.max(a[1], b[1]));
  const inter = iw * ih;
  const union = a[2] * a[3] + b[2] * b[3] - inter;
  return union > 0 ? inter / union : 0;
}

/** Tight bounding box of a mask's set pixels, or null for an empty mask. */
export function maskBoundingBox(mask: ObjectMask): Box | null {
  let minU = Infinity;
  let minV = Infinity;
  let maxU = -Infinity;
  let maxV = -Infinity;
  for (let v = 0; v < mask.height; v++) {
    for (let u = 0; u < mask.width; u++) {
      if (mask.pixels[v * mask.width + u]) {
        if (u < minU) minU = u;
        if (u > maxU) maxU = u;
        if (v < minV) minV = v;
        if (v > maxV) maxV = v;
      }
    }
  }
  if (minU === Infinity) return null;
  return [minU, minV, maxU - minU + 1, maxV - minV + 1];
}

/** Class label of the detection whose box best overlaps the mask's tight
 *  bounding box. IoU below the threshold yields "unknown"; ties prefer the
 *  higher confidence, then the lower box index. With `pixelMode` the IoU is
 *  computed between the box and the mask pixels themselves. */
export function matchClass(
  mask: ObjectMask,
  detections: Detection[],
  pixelMode = false,
): string {
  const bbox = maskBoundingBox(mask);
  if (!bbox) return "unknown";
  let best = -1;
  let bestScore = 0;
  let bestConf = -1;
  detections.forEach((det, i) => {
    const score = pixelMode ? maskPixelIou(mask, det.box) : iou(bbox, det.box);
    if (
      score > bestScore ||
      (score === bestScore && best >= 0 && det.confidence > bestConf)
    ) {
      best = i;
      bestScore = score;
      bestConf = det.confidence;
    }
  });
  if (best < 0 || bestScore < IOU_THRESHOLD) return "unknown";
  return detections[best].class;
}

function maskPixelIou(mask: ObjectMask, box: Box): number {
  const [bx, by, bw, bh] = box;
  let maskArea = 0;
  let inter = 0;
  for (let v = 0; v < mask.height; v++) {
    for (let u = 0; u < mask.width; u++) {
      if (!mask.pixels[v * mask.width + u]) continue;
      maskArea += 1;
      if (u >= bx && u < bx + bw && v >= by && v < by + bh) inter += 1;
    }
  }
  const union = maskArea + bw * bh - inter;
  return union > 0 ? inter / union : 0;
}
