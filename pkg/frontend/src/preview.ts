/**
 * Client-side NFOV preview: per-pixel rectilinear remap of an equirect
 * frame, mirroring the Python renderer pixel for pixel. Pixel j's center
 * sits at j + 0.5; sampling is bilinear with horizontal wrap across the
 * azimuth seam and vertical clamp at the poles.
 */

import {
  CameraPose,
  directionToEquirect,
  fovFromFocal,
  mod,
  ndcToDirection,
  planeExtents,
} from "./geometry.js";

export interface EquirectImage {
  width: number;
  height: number;
  /** Row-major RGB, 3 numbers per pixel. */
  pixels: Float64Array | Uint8ClampedArray | number[];
  channels: number;
}

export function bilinearSample(
  img: EquirectImage,
  u: number,
  v: number,
  out: number[],
): void {
  const { width: w, height: h, pixels, channels } = img;
  const x = u - 0.5;
  const y = v - 0.5;
  const x0 = Math.floor(x);
  const y0 = Math.floor(y);
  const fx = x - x0;
  const fy = y - y0;
  const x0w = mod(x0, w);
  const x1w = mod(x0 + 1, w);
  const y0c = Math.min(h - 1, Math.max(0, y0));
  const y1c = Math.min(h - 1, Math.max(0, y0 + 1));
  for (let c = 0; c < channels; c++) {
    const top =
      (pixels[(y0c * w + x0w) * channels + c] as number) * (1 - fx) +
      (pixels[(y0c * w + x1w) * channels + c] as number) * fx;
    const bot =
      (pixels[(y1c * w + x0w) * channels + c] as number) * (1 - fx) +
      (pixels[(y1c * w + x1w) * channels + c] as number) * fx;
    out[c] = top * (1 - fy) + bot * fy;
  }
}

/**
 * Render one preview frame. Returns row-major RGB bytes (rounded and
 * clamped), outWidth * outHeight * 3 long.
 */
export function renderPreviewFrame(
  frame: EquirectImage,
  pose: CameraPose,
  outWidth: number,
  outHeight: number,
): Uint8ClampedArray {
  const fov = fovFromFocal(pose.focalScale);
  const { halfW, halfH } = planeExtents(outWidth, outHeight, fov);
  const out = new Uint8ClampedArray(outWidth * outHeight * 3);
  const rgb = [0, 0, 0, 0];
  for (let i = 0; i < outHeight; i++) {
    const yNdc = ((i + 0.5) / outHeight - 0.5) * 2;
    for (let j = 0; j < outWidth; j++) {
      const xNdc = ((j + 0.5) / outWidth - 0.5) * 2;
      const d = ndcToDirection(xNdc, yNdc, pose, halfW, halfH);
      const { u, v } = directionToEquirect(d, frame.width, frame.height);
      bilinearSample(frame, u, v, rgb);
      const base = (i * outWidth + j) * 3;
      out[base] = Math.round(rgb[0]);
      out[base + 1] = Math.round(rgb[1]);
      out[base + 2] = Math.round(rgb[2]);
    }
  }
  return out;
}

/** Pack nested [row][col][rgb] arrays (e.g. from JSON) into an image. */
export function imageFromNested(pixels: number[][][]): EquirectImage {
  const height = pixels.length;
  const width = pixels[0].length;
  const flat = new Float64Array(width * height * 3);
  for (let i = 0; i < height; i++) {
    for (let j = 0; j < width; j++) {
      flat[(i * width + j) * 3] = pixels[i][j][0];
      flat[(i * width + j) * 3 + 1] = pixels[i][j][1];
      flat[(i * width + j) * 3 + 2] = pixels[i][j][2];
    }
  }
  return { width, height, pixels: flat, channels: 3 };
}
