/**
 * Viewport border overlay: samples the NFOV frame boundary with the same
 * rectilinear model the renderer uses and backprojects it onto the strip,
 * splitting the polyline when it leaves the strip through one side and
 * re-enters through a duplicate band.
 */

import {
  CameraPose,
  directionToAngles,
  fovFromFocal,
  ndcToDirection,
  planeExtents,
  wrapDelta,
} from "./geometry.js";
import { STRIP_SPAN_DEG, StripSize } from "./strip.js";

export interface BorderPoint {
  xNdc: number;
  yNdc: number;
  thetaDeg: number;
  phiDeg: number;
}

/**
 * Viewport border sampled clockwise from the top-left corner: top edge
 * left to right, right edge down, bottom edge right to left, left edge
 * up. nPerEdge points per edge, 4 * nPerEdge total (closed polygon).
 */
export function borderPoints(
  pose: CameraPose,
  aspectW: number,
  aspectH: number,
  nPerEdge: number,
): BorderPoint[] {
  const fov = fovFromFocal(pose.focalScale);
  const { halfW, halfH } = planeExtents(aspectW, aspectH, fov);
  const ndc: [number, number][] = [];
  for (let i = 0; i < nPerEdge; i++) {
    ndc.push([-1 + (2 * i) / nPerEdge, -1]);
  }
  for (let i = 0; i < nPerEdge; i++) {
    ndc.push([1, -1 + (2 * i) / nPerEdge]);
  }
  for (let i = 0; i < nPerEdge; i++) {
    ndc.push([1 - (2 * i) / nPerEdge, 1]);
  }
  for (let i = 0; i < nPerEdge; i++) {
    ndc.push([-1, 1 - (2 * i) / nPerEdge]);
  }
  return ndc.map(([x, y]) => {
    const d = ndcToDirection(x, y, pose, halfW, halfH);
    const { thetaDeg, phiDeg } = directionToAngles(d);
    return { xNdc: x, yNdc: y, thetaDeg, phiDeg };
  });
}

export interface StripPolyline {
  points: { x: number; y: number }[];
}

/**
 * Map a closed border polygon onto strip pixel coordinates. Azimuths are
 * unwrapped around the pose center so the curve stays contiguous across
 * the equirect seam, and the whole curve is repeated one duplicate-band
 * period (360 degrees of strip) to each side so the overlay also shows
 * up on duplicated content. A polyline splits where it leaves the strip
 * or where the unwrapped azimuth itself wraps (a viewport containing a
 * pole spans the full azimuth circle).
 */
export function borderToStripPolylines(
  border: BorderPoint[],
  pose: CameraPose,
  size: StripSize,
  panDeg: number,
): StripPolyline[] {
  const period = (size.width * 360) / STRIP_SPAN_DEG;
  const centerX =
    size.width * (0.5 + wrapDelta(pose.phiDeg - panDeg) / STRIP_SPAN_DEG);
  const base = border.map((pt) => ({
    x: centerX + (wrapDelta(pt.phiDeg - pose.phiDeg) * size.width) / STRIP_SPAN_DEG,
    y: size.height * (0.5 - pt.thetaDeg / 180),
  }));
  const segments: StripPolyline[] = [];
  for (const shift of [-period, 0, period]) {
    let current: { x: number; y: number }[] = [];
    let prevX: number | null = null;
    for (const p of base) {
      const x = p.x + shift;
      const inRange = x >= 0 && x <= size.width;
      const jumps = prevX !== null && Math.abs(x - prevX) > period / 2;
      if (!inRange || jumps) {
        if (current.length > 1) segments.push({ points: current });
        current = [];
        prevX = null;
      }
      if (inRange) {
        current.push({ x, y: p.y });
        prevX = x;
      }
    }
    if (current.length > 1) segments.push({ points: current });
  }
  return segments;
}

/** Shoelace area of the border polygon in strip pixel coordinates^2. */
export function overlayArea(
  pose: CameraPose,
  aspectW: number,
  aspectH: number,
  nPerEdge: number,
  size: StripSize,
  panDeg: number,
): number {
  const border = borderPoints(pose, aspectW, aspectH, nPerEdge);
  const centerX =
    size.width * (0.5 + wrapDelta(pose.phiDeg - panDeg) / STRIP_SPAN_DEG);
  let area = 0;
  const pts = border.map((pt) => ({
    x: centerX + (wrapDelta(pt.phiDeg - pose.phiDeg) * size.width) / STRIP_SPAN_DEG,
    y: size.height * (0.5 - pt.thetaDeg / 180),
  }));
  for (let i = 0; i < pts.length; i++) {
    const a = pts[i];
    const b = pts[(i + 1) % pts.length];
    area += a.x * b.y - b.x * a.y;
  }
  return Math.abs(area) / 2;
}
