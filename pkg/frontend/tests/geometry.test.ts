import { describe, expect, it } from "vitest";

import {
  angleBetweenDeg,
  directionToAngles,
  directionToEquirect,
  fovFromFocal,
  mod,
  poseToDirection,
  stepZoom,
  wrapDelta,
  ZOOM_LEVELS,
} from "../src/geometry.js";
import { lcg, loadGolden } from "./golden.js";

const golden = loadGolden();

describe("lens model", () => {
  it("matches the golden FOV per focal scale", () => {
    for (const [key, fov] of Object.entries(golden.fov_deg)) {
      expect(fovFromFocal(Number(key))).toBeCloseTo(fov, 5);
    }
  });

  it("hits the documented triple within 0.05 degrees", () => {
    expect(Math.abs(fovFromFocal(0.5) - 104.3)).toBeLessThan(0.05);
    expect(Math.abs(fovFromFocal(1.0) - 65.5)).toBeLessThan(0.05);
    expect(Math.abs(fovFromFocal(1.5) - 46.4)).toBeLessThan(0.05);
  });
});

describe("zoom stepping", () => {
  it("matches every golden transition", () => {
    for (const c of golden.zoom_steps) {
      expect(stepZoom(c.from, c.direction)).toBe(c.to);
    }
  });

  it("clamps at both ends", () => {
    expect(stepZoom(1.5, "in")).toBe(1.5);
    expect(stepZoom(0.5, "out")).toBe(0.5);
  });

  it("never moves more than one level", () => {
    for (const f of ZOOM_LEVELS) {
      for (const dir of ["in", "out"] as const) {
        expect(Math.abs(stepZoom(f, dir) - f)).toBeLessThanOrEqual(0.5 + 1e-12);
      }
    }
  });

  it("rejects off-lattice focal scales", () => {
    expect(() => stepZoom(0.75, "in")).toThrow(/zoom level/);
  });
});

describe("angles and directions", () => {
  it("round trips pose -> direction -> pose", () => {
    const rand = lcg(11);
    for (let n = 0; n < 200; n++) {
      const theta = (rand() - 0.5) * 178;
      const phi = rand() * 360;
      const d = poseToDirection(theta, phi);
      const back = directionToAngles(d);
      expect(back.thetaDeg).toBeCloseTo(theta, 9);
      expect(Math.abs(wrapDelta(back.phiDeg - phi))).toBeLessThan(1e-9);
    }
  });

  it("maps the axes where the conventions say", () => {
    expect(poseToDirection(0, 0)[0]).toBeCloseTo(1, 12);
    // Azimuth 90 is the viewer's left: +y.
    expect(poseToDirection(0, 90)[1]).toBeCloseTo(1, 12);
    expect(poseToDirection(90, 0)[2]).toBeCloseTo(1, 12);
  });

  it("places directions on the equirect grid", () => {
    const { u, v } = directionToEquirect(poseToDirection(0, 90), 360, 180);
    expect(u).toBeCloseTo(90, 9);
    expect(v).toBeCloseTo(90, 9);
    const top = directionToEquirect(poseToDirection(90, 0), 360, 180);
    expect(top.v).toBeCloseTo(0, 6);
  });

  it("angleBetween agrees with hand values", () => {
    expect(
      angleBetweenDeg(poseToDirection(0, 0), poseToDirection(0, 90)),
    ).toBeCloseTo(90, 9);
    expect(
      angleBetweenDeg(poseToDirection(45, 0), poseToDirection(-45, 0)),
    ).toBeCloseTo(90, 9);
  });

  it("mod and wrapDelta handle negatives", () => {
    expect(mod(-30, 360)).toBe(330);
    expect(wrapDelta(350)).toBe(-10);
    expect(wrapDelta(-190)).toBe(170);
    expect(wrapDelta(180)).toBe(-180);
  });
});
