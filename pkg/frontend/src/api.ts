/**
 * Client for the vcam360 serve endpoints: GET /manifest, GET /grid,
 * GET /frames/<idx>.png, POST /trajectories. Uploads that fail are
 * retained in an in-memory queue (mirrored to localStorage when one is
 * available) so a pass is never lost to a network blip.
 */

import { HumanTrackJson } from "./session.js";

export interface VideoManifest {
  width: number;
  height: number;
  fps: number;
  frame_count: number;
  [key: string]: unknown;
}

export interface UploadResult {
  saved: string | null;
  retained: boolean;
}

const RETAINED_KEY = "vcam360.retained_uploads";

export class EditorApi {
  readonly baseUrl: string;
  private retained: HumanTrackJson[] = [];

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.loadRetained();
  }

  frameUrl(index: number): string {
    return `${this.baseUrl}/frames/${String(index).padStart(6, "0")}.png`;
  }

  async fetchManifest(): Promise<VideoManifest> {
    const res = await fetch(`${this.baseUrl}/manifest`);
    if (!res.ok) {
      throw new Error(`manifest fetch failed: ${res.status}`);
    }
    return (await res.json()) as VideoManifest;
  }

  async fetchGrid(): Promise<Record<string, unknown>> {
    const res = await fetch(`${this.baseUrl}/grid`);
    if (!res.ok) {
      throw new Error(`grid fetch failed: ${res.status}`);
    }
    return (await res.json()) as Record<string, unknown>;
  }

  async uploadTrack(track: HumanTrackJson): Promise<UploadResult> {
    try {
      const res = await fetch(`${this.baseUrl}/trajectories`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(track),
      });
      if (!res.ok) {
        throw new Error(`upload rejected: ${res.status}`);
      }
      const body = (await res.json()) as { saved: string };
      return { saved: body.saved, retained: false };
    } catch {
      this.retained.push(track);
      this.saveRetained();
      return { saved: null, retained: true };
    }
  }

  /** Retry every retained upload; keeps the ones that fail again. */
  async retryRetained(): Promise<number> {
    const pending = this.retained;
    this.retained = [];
    this.saveRetained();
    let sent = 0;
    for (const track of pending) {
      const result = await this.uploadTrack(track);
      if (!result.retained) {
        sent += 1;
      }
    }
    return sent;
  }

  retainedCount(): number {
    return this.retained.length;
  }

  private loadRetained(): void {
    if (typeof localStorage === "undefined") return;
    try {
      const raw = localStorage.getItem(RETAINED_KEY);
      if (raw) {
        this.retained = JSON.parse(raw) as HumanTrackJson[];
      }
    } catch {
      this.retained = [];
    }
  }

  private saveRetained(): void {
    if (typeof localStorage === "undefined") return;
    try {
      localStorage.setItem(RETAINED_KEY, JSON.stringify(this.retained));
    } catch {
      // Storage may be full or blocked; the in-memory queue still holds them.
    }
  }
}
