import { readFileSync } from "node:fs";

export interface PointerCase {
  pan_deg: number;
  width: number;
  height: number;
  x: number;
  y: number;
  theta_deg: number;
  phi_deg: number;
}

export interface PoseToStripCase {
  pan_deg: number;
  width: number;
  height: number;
  theta_deg: number;
  phi_deg: number;
  x: number;
  y: number;
  alternate_x: number[];
}

export interface BorderEntry {
  pose: { theta_deg: number; phi_deg: number; focal_scale: number };
  aspect: [number, number];
  n_per_edge: number;
  points: { x_ndc: number; y_ndc: number; theta_deg: number; phi_deg: number }[];
}

export interface GoldenVectors {
  conventions: Record<string, unknown>;
  pan_protocol_deg: number[];
  zoom_levels: number[];
  fov_deg: Record<string, number>;
  pointer_cases: PointerCase[];
  pose_to_strip_cases: PoseToStripCase[];
  zoom_steps: { from: number; direction: "in" | "out"; to: number }[];
  viewport_borders: BorderEntry[];
  strip_columns: {
    pan_deg: number;
    eq_width: number;
    strip_width: number;
    source_col: number[];
  }[];
  preview: {
    frame: { width: number; height: number; pixels: number[][][] };
    viewport: { width: number; height: number };
    rgb_tolerance: number;
    cases: {
      pose: { theta_deg: number; phi_deg: number; focal_scale: number };
      samples: { x: number; y: number; rgb: [number, number, number] }[];
    }[];
  };
  recording: {
    fps: number;
    duration_s: number;
    frame_count: number;
    last_frame_index: number;
  };
}

export function loadGolden(): GoldenVectors {
  const url = new URL("../../shared/golden_ui_vectors.json", import.meta.url);
  return JSON.parse(readFileSync(url, "utf8")) as GoldenVectors;
}

export function loadExampleTrack(): Record<string, unknown> {
  const url = new URL("../../shared/example_human_track.json", import.meta.url);
  return JSON.parse(readFileSync(url, "utf8")) as Record<string, unknown>;
}

/** Small deterministic generator so property-style loops stay frozen. */
export function lcg(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 2 ** 32;
  };
}
