/**
 * The panoramic strip: the panned equirect frame with 90 degrees of
 * duplicated content on each side, 540 degrees of azimuth total. The
 * strip's horizontal center shows azimuth == pan offset and azimuth
 * increases to the right (equirect column order); the vertical axis is
 * plain latitude with the top edge clamped to +90.
 */

import { mod, wrapDelta } from "./geometry.js";

export const STRIP_SPAN_DEG = 540;
export const EXTENSION_DEG = 90;

export interface StripSize {
  width: number;
  height: number;
}

/** Strip pixel width for an equirect frame width (540/360 of it). */
export function stripWidthFor(eqWidth: number): number {
  return Math.round((eqWidth * STRIP_SPAN_DEG) / 360);
}

/** Elevation/azimuth under the pointer at strip coordinates (x, y). */
export function stripPointToPose(
  x: number,
  y: number,
  size: StripSize,
  panDeg: number,
): { thetaDeg: number; phiDeg: number } {
  const phi = mod(panDeg + (x / size.width - 0.5) * STRIP_SPAN_DEG, 360);
  const theta = Math.max(-90, Math.min(90, (0.5 - y / size.height) * 180));
  return { thetaDeg: theta, phiDeg: phi };
}

/**
 * Strip coordinates of a pose. The primary x uses the azimuth
 * representative nearest the strip center; when the azimuth also falls
 * inside a duplicate band, that second x is listed in alternateX.
 */
export function poseToStripPoint(
  thetaDeg: number,
  phiDeg: number,
  size: StripSize,
  panDeg: number,
): { x: number; y: number; alternateX: number[] } {
  const delta = wrapDelta(phiDeg - panDeg);
  const x = size.width * (0.5 + delta / STRIP_SPAN_DEG);
  const y = size.height * (0.5 - thetaDeg / 180);
  const alternateX: number[] = [];
  for (const shift of [-360, 360]) {
    const xa = size.width * (0.5 + (delta + shift) / STRIP_SPAN_DEG);
    if (xa >= 0 && xa <= size.width) {
      alternateX.push(xa);
    }
  }
  return { x, y, alternateX };
}

/** Equirect source column per strip column (nearest neighbor). */
export function stripSourceColumns(
  eqWidth: number,
  stripWidth: number,
  panDeg: number,
): number[] {
  const cols: number[] = [];
  for (let j = 0; j < stripWidth; j++) {
    const { phiDeg } = stripPointToPose(
      j + 0.5, 0.5, { width: stripWidth, height: 1 }, panDeg,
    );
    cols.push(mod(Math.floor((phiDeg / 360) * eqWidth), eqWidth));
  }
  return cols;
}

/**
 * Destination offsets (as strip-width fractions) at which the full
 * equirect image must be drawn to tile the 540-degree strip. Each draw
 * is 360/540 = 2/3 of the strip wide and starts where azimuth 0 appears,
 * so no draw ever crosses the equirect seam; two or three draws cover
 * the strip depending on the pan.
 */
export function stripDrawOffsets(panDeg: number): number[] {
  const offsets: number[] = [];
  for (let m = -1; m <= 2; m++) {
    const g0 = 0.5 + (360 * m - panDeg) / STRIP_SPAN_DEG;
    if (g0 < 1 && g0 + 360 / STRIP_SPAN_DEG > 0) {
      offsets.push(g0);
    }
  }
  return offsets;
}
