/**
 * Annotation session state: one recording pass over one video. Each video
 * gets four passes whose strip pan offsets alternate 0, 180, 0, 180
 * degrees, so content near the equirect seam sits mid-strip on half the
 * passes. Poses are recorded at the video frame rate, one per frame.
 */

import { CameraPose } from "./geometry.js";

export const PAN_PROTOCOL_DEG = [0, 180, 0, 180] as const;

export interface HumanTrackFrame {
  theta_deg: number;
  phi_deg: number;
  focal_scale: number;
}

export interface HumanTrackJson {
  kind: "human";
  video_id: string;
  pass_index: number;
  pan_deg: number;
  editor_id: string;
  fps: number;
  frames: HumanTrackFrame[];
}

export class AnnotationSession {
  readonly videoId: string;
  readonly passIndex: number;
  readonly panOffsetDeg: number;
  readonly editorId: string;
  readonly fps: number;
  readonly frameCount: number;
  private readonly track: (CameraPose | null)[];

  constructor(opts: {
    videoId: string;
    passIndex: number;
    editorId: string;
    fps: number;
    frameCount: number;
  }) {
    if (!Number.isInteger(opts.passIndex) || opts.passIndex < 1 || opts.passIndex > 4) {
      throw new Error(`pass index must be 1..4, got ${opts.passIndex}`);
    }
    if (opts.fps <= 0 || !Number.isInteger(opts.frameCount) || opts.frameCount < 1) {
      throw new Error("session needs a positive fps and frame count");
    }
    this.videoId = opts.videoId;
    this.passIndex = opts.passIndex;
    this.panOffsetDeg = PAN_PROTOCOL_DEG[opts.passIndex - 1];
    this.editorId = opts.editorId;
    this.fps = opts.fps;
    this.frameCount = opts.frameCount;
    this.track = new Array(opts.frameCount).fill(null);
  }

  /** Timestamp of a frame index, seconds. */
  timeOf(frameIndex: number): number {
    return frameIndex / this.fps;
  }

  /** Frame index playing at a timestamp (floor, clamped to the clip). */
  frameAt(timeS: number): number {
    const idx = Math.floor(timeS * this.fps);
    return Math.min(this.frameCount - 1, Math.max(0, idx));
  }

  recordFrame(frameIndex: number, pose: CameraPose): void {
    if (!Number.isInteger(frameIndex) || frameIndex < 0 || frameIndex >= this.frameCount) {
      throw new Error(
        `frame index ${frameIndex} outside 0..${this.frameCount - 1}`,
      );
    }
    this.track[frameIndex] = { ...pose };
  }

  recordedCount(): number {
    return this.track.reduce((n, p) => n + (p === null ? 0 : 1), 0);
  }

  isComplete(): boolean {
    return this.recordedCount() === this.frameCount;
  }

  /**
   * Fill unrecorded frames by holding the nearest earlier recorded pose
   * (or the first recorded pose for a gap at the start). Playback can
   * drop pointer samples; export must still carry one pose per frame.
   */
  fillGaps(): void {
    const first = this.track.find((p) => p !== null);
    if (!first) {
      throw new Error("cannot fill gaps: nothing recorded");
    }
    let last: CameraPose = first;
    for (let i = 0; i < this.frameCount; i++) {
      const cur = this.track[i];
      if (cur === null) {
        this.track[i] = { ...last };
      } else {
        last = cur;
      }
    }
  }

  export(): HumanTrackJson {
    if (!this.isComplete()) {
      throw new Error(
        `track incomplete: ${this.recordedCount()} of ${this.frameCount} frames`,
      );
    }
    return {
      kind: "human",
      video_id: this.videoId,
      pass_index: this.passIndex,
      pan_deg: this.panOffsetDeg,
      editor_id: this.editorId,
      fps: this.fps,
      frames: this.track.map((p) => ({
        theta_deg: p!.thetaDeg,
        phi_deg: p!.phiDeg,
        focal_scale: p!.focalScale,
      })),
    };
  }
}
