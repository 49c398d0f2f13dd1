import { describe, expect, it } from "vitest";

import { Player } from "../src/player.js";

/** Player driven by a hand-cranked clock (milliseconds). */
function clocked(frameCount = 40, fps = 20) {
  let t = 0;
  const player = new Player(frameCount, fps, () => t);
  return { player, tick: (ms: number) => (t += ms) };
}

describe("Player", () => {
  it("loops a 40-frame motion at 20 fps in exactly 2 seconds", () => {
    const { player, tick } = clocked(40, 20);
    expect(player.loopSeconds()).toBe(2);
    player.play();
    tick(1999);
    expect(player.frameIndex()).toBe(39);
    tick(1);
    expect(player.frameIndex()).toBe(0); // wrapped after one loop
    tick(2000);
    expect(player.frameIndex()).toBe(0); // and after two
  });

  it("starts paused at frame 0", () => {
    const { player, tick } = clocked();
    expect(player.isPlaying()).toBe(false);
    tick(5000);
    expect(player.frameIndex()).toBe(0);
  });

  it("advances in proportion to elapsed time", () => {
    const { player, tick } = clocked(40, 20);
    player.play();
    tick(500); // 0.5 s at 20 fps
    expect(player.cursor()).toBeCloseTo(10, 9);
    tick(250);
    expect(player.frameIndex()).toBe(15);
  });

  it("freezes on pause and resumes from the same spot", () => {
    const { player, tick } = clocked(40, 20);
    player.play();
    tick(750);
    player.pause();
    tick(9999);
    expect(player.frameIndex()).toBe(15);
    player.play();
    tick(250);
    expect(player.frameIndex()).toBe(20);
  });

  it("seeks with wraparound in both directions", () => {
    const { player, tick } = clocked(40, 20);
    player.seek(5);
    expect(player.frameIndex()).toBe(5);
    player.seek(-1);
    expect(player.frameIndex()).toBe(39);
    player.seek(45);
    expect(player.frameIndex()).toBe(5);
    player.play();
    tick(100); // 2 frames
    expect(player.frameIndex()).toBe(7);
  });

  it("rejects invalid construction arguments", () => {
    expect(() => new Player(0, 20)).toThrow(RangeError);
    expect(() => new Player(1.5, 20)).toThrow(RangeError);
    expect(() => new Player(40, 0)).toThrow(RangeError);
    expect(() => new Player(40, -3)).toThrow(RangeError);
  });
});
