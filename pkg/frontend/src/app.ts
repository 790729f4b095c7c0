/**
 * Editor wiring: strip canvas, pointer-driven camera, zoom buttons, the
 * four-pass recording flow, upload, and the post-pass preview. All the
 * geometry lives in the imported modules; this file only moves pixels
 * and DOM state around.
 */

import { EditorApi, VideoManifest } from "./api.js";
import { CameraPose, stepZoom } from "./geometry.js";
import { borderPoints, borderToStripPolylines } from "./overlay.js";
import { EquirectImage, renderPreviewFrame } from "./preview.js";
import { AnnotationSession, PAN_PROTOCOL_DEG } from "./session.js";
import { stripDrawOffsets, stripPointToPose, StripSize } from "./strip.js";

const PREVIEW_W = 480;
const PREVIEW_H = 270;
const OVERLAY_SAMPLES_PER_EDGE = 24;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class EditorApp {
  private api: EditorApi;
  private manifest: VideoManifest | null = null;
  private frames: HTMLImageElement[] = [];
  private session: AnnotationSession | null = null;
  private passIndex = 1;
  private pose: CameraPose = { thetaDeg: 0, phiDeg: 0, focalScale: 1.0 };
  private playing = false;
  private playStart = 0;
  private lastRecorded = -1;
  private videoId: string;
  private editorId: string;

  private strip: HTMLCanvasElement;
  private preview: HTMLCanvasElement;
  private status: HTMLElement;

  constructor() {
    const params = new URLSearchParams(location.search);
    this.api = new EditorApi(params.get("server") ?? "");
    this.videoId = params.get("video") ?? "video";
    this.editorId = params.get("editor") ?? "anon";
    this.strip = el<HTMLCanvasElement>("strip");
    this.preview = el<HTMLCanvasElement>("preview");
    this.status = el<HTMLElement>("status");
    el<HTMLButtonElement>("zoom-in").onclick = () => this.zoom("in");
    el<HTMLButtonElement>("zoom-out").onclick = () => this.zoom("out");
    el<HTMLButtonElement>("start-pass").onclick = () => void this.startPass();
    this.strip.addEventListener("pointermove", (ev) => this.onPointer(ev));
    window.addEventListener("keydown", (ev) => {
      if (ev.key === "i") this.zoom("in");
      if (ev.key === "o") this.zoom("out");
    });
  }

  async init(): Promise<void> {
    this.setStatus("loading manifest...");
    try {
      this.manifest = await this.api.fetchManifest();
    } catch (err) {
      this.setStatus(`cannot reach server: ${String(err)}. retrying in 3s`);
      setTimeout(() => void this.init(), 3000);
      return;
    }
    await this.loadFrames();
    this.setStatus(
      `ready: ${this.manifest.frame_count} frames at ${this.manifest.fps} fps. ` +
      `pass ${this.passIndex} of 4 (pan ${PAN_PROTOCOL_DEG[this.passIndex - 1]} deg)`,
    );
    this.drawStrip(0);
  }

  private panDeg(): number {
    return PAN_PROTOCOL_DEG[this.passIndex - 1];
  }

  private stripSize(): StripSize {
    return { width: this.strip.width, height: this.strip.height };
  }

  private async loadFrames(): Promise<void> {
    const m = this.manifest!;
    this.frames = new Array(m.frame_count);
    const loads: Promise<void>[] = [];
    for (let i = 0; i < m.frame_count; i++) {
      const img = new Image();
      img.src = this.api.frameUrl(i);
      this.frames[i] = img;
      loads.push(
        img.decode().catch(() => {
          this.setStatus(`frame ${i} failed to load; will retry on draw`);
        }),
      );
      if (loads.length % 8 === 0) {
        await Promise.all(loads.splice(0));
        this.setStatus(`loading frames ${i + 1}/${m.frame_count}`);
      }
    }
    await Promise.all(loads);
  }

  private onPointer(ev: PointerEvent): void {
    const rect = this.strip.getBoundingClientRect();
    const x = ((ev.clientX - rect.left) / rect.width) * this.strip.width;
    const y = ((ev.clientY - rect.top) / rect.height) * this.strip.height;
    const { thetaDeg, phiDeg } = stripPointToPose(
      x, y, this.stripSize(), this.panDeg(),
    );
    this.pose = { ...this.pose, thetaDeg, phiDeg };
    if (!this.playing) {
      this.drawStrip(0);
    }
  }

  private zoom(direction: "in" | "out"): void {
    this.pose = {
      ...this.pose,
      focalScale: stepZoom(this.pose.focalScale, direction),
    };
    if (!this.playing) {
      this.drawStrip(this.currentFrameIndex());
    }
  }

  private currentFrameIndex(): number {
    if (!this.playing || !this.manifest || !this.session) return 0;
    const elapsed = (performance.now() - this.playStart) / 1000;
    return Math.min(
      this.manifest.frame_count - 1,
      Math.max(0, Math.floor(elapsed * this.manifest.fps)),
    );
  }

  private async startPass(): Promise<void> {
    if (!this.manifest || this.playing) return;
    this.session = new AnnotationSession({
      videoId: this.videoId,
      passIndex: this.passIndex,
      editorId: this.editorId,
      fps: this.manifest.fps,
      frameCount: this.manifest.frame_count,
    });
    this.playing = true;
    this.playStart = performance.now();
    this.lastRecorded = -1;
    this.tick();
  }

  private tick(): void {
    if (!this.playing || !this.manifest || !this.session) return;
    const idx = this.currentFrameIndex();
    // One recorded pose per video frame: fill every index reached since
    // the last animation tick with the pose held during that span.
    for (let i = this.lastRecorded + 1; i <= idx; i++) {
      this.session.recordFrame(i, this.pose);
    }
    this.lastRecorded = idx;
    this.drawStrip(idx);
    const elapsed = (performance.now() - this.playStart) / 1000;
    if (elapsed >= this.manifest.frame_count / this.manifest.fps) {
      this.playing = false;
      void this.finishPass();
      return;
    }
    requestAnimationFrame(() => this.tick());
  }

  private async finishPass(): Promise<void> {
    const session = this.session!;
    if (!session.isComplete()) {
      session.fillGaps();
    }
    const track = session.export();
    this.setStatus(`pass ${this.passIndex} done, uploading...`);
    const result = await this.api.uploadTrack(track);
    if (result.retained) {
      this.setStatus(
        `upload failed; kept locally (${this.api.retainedCount()} pending). ` +
        `press start to retry with the next pass.`,
      );
      void this.api.retryRetained();
    } else {
      this.setStatus(`saved as ${result.saved}. rendering preview...`);
    }
    await this.playPreview(track.frames);
    if (this.passIndex < PAN_PROTOCOL_DEG.length) {
      this.passIndex += 1;
      this.setStatus(
        `pass ${this.passIndex} of 4 ready (pan ${this.panDeg()} deg)`,
      );
    } else {
      this.setStatus("all 4 passes recorded. thank you!");
    }
  }

  private equirectData(idx: number): EquirectImage {
    const img = this.frames[idx];
    const off = document.createElement("canvas");
    off.width = img.naturalWidth;
    off.height = img.naturalHeight;
    const ctx = off.getContext("2d")!;
    ctx.drawImage(img, 0, 0);
    const data = ctx.getImageData(0, 0, off.width, off.height);
    return {
      width: off.width,
      height: off.height,
      pixels: data.data,
      channels: 4,
    };
  }

  private async playPreview(
    frames: { theta_deg: number; phi_deg: number; focal_scale: number }[],
  ): Promise<void> {
    const m = this.manifest!;
    const ctx = this.preview.getContext("2d")!;
    this.preview.width = PREVIEW_W;
    this.preview.height = PREVIEW_H;
    for (let i = 0; i < frames.length; i++) {
      const eq = this.equirectData(i);
      const f = frames[i];
      const rgb = renderPreviewFrame(
        eq,
        { thetaDeg: f.theta_deg, phiDeg: f.phi_deg, focalScale: f.focal_scale },
        PREVIEW_W,
        PREVIEW_H,
      );
      const out = ctx.createImageData(PREVIEW_W, PREVIEW_H);
      for (let p = 0; p < PREVIEW_W * PREVIEW_H; p++) {
        out.data[p * 4] = rgb[p * 3];
        out.data[p * 4 + 1] = rgb[p * 3 + 1];
        out.data[p * 4 + 2] = rgb[p * 3 + 2];
        out.data[p * 4 + 3] = 255;
      }
      ctx.putImageData(out, 0, 0);
      await new Promise((resolve) => setTimeout(resolve, 1000 / m.fps));
    }
  }

  private drawStrip(frameIdx: number): void {
    const ctx = this.strip.getContext("2d")!;
    const size = this.stripSize();
    ctx.clearRect(0, 0, size.width, size.height);
    const img = this.frames[frameIdx];
    if (img && img.complete && img.naturalWidth > 0) {
      const drawW = (size.width * 360) / 540;
      for (const g0 of stripDrawOffsets(this.panDeg())) {
        ctx.drawImage(img, g0 * size.width, 0, drawW, size.height);
      }
    }
    const border = borderPoints(this.pose, 16, 9, OVERLAY_SAMPLES_PER_EDGE);
    const polylines = borderToStripPolylines(
      border, this.pose, size, this.panDeg(),
    );
    ctx.strokeStyle = "#ff4040";
    ctx.lineWidth = 2;
    for (const seg of polylines) {
      ctx.beginPath();
      seg.points.forEach((p, i) =>
        i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y),
      );
      ctx.stroke();
    }
    ctx.fillStyle = "#fff";
    ctx.font = "12px monospace";
    ctx.fillText(
      `theta ${this.pose.thetaDeg.toFixed(1)} phi ${this.pose.phiDeg.toFixed(1)} ` +
      `zoom ${this.pose.focalScale.toFixed(1)}`,
      8, size.height - 8,
    );
  }

  private setStatus(text: string): void {
    this.status.textContent = text;
  }
}

if (typeof document !== "undefined" && document.getElementById("strip")) {
  const app = new EditorApp();
  void app.init();
}
