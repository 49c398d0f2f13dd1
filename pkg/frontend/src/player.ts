/** Wall-clock playback cursor: advancing is tied to real elapsed time,
 * so a 40-frame motion at 20 fps loops in exactly 2 seconds of clock
 * time regardless of render rate.
 */

export class Player {
  readonly frameCount: number;
  readonly fps: number;
  private readonly now: () => number;
  private playing = false;
  private anchorTime = 0;
  private anchorCursor = 0;

  constructor(frameCount: number, fps: number, now: () => number = () => performance.now()) {
    if (!Number.isInteger(frameCount) || frameCount < 1) {
      throw new RangeError(`frameCount must be a positive integer, got ${frameCount}`);
    }
    if (!(fps > 0)) {
      throw new RangeError(`fps must be positive, got ${fps}`);
    }
    this.frameCount = frameCount;
    this.fps = fps;
    this.now = now;
  }

  loopSeconds(): number {
    return this.frameCount / this.fps;
  }

  isPlaying(): boolean {
    return this.playing;
  }

  play(): void {
    if (this.playing) return;
    this.anchorTime = this.now();
    this.playing = true;
  }

  pause(): void {
    if (!this.playing) return;
    this.anchorCursor = this.cursor();
    this.playing = false;
  }

  seek(frame: number): void {
    this.anchorCursor = ((frame % this.frameCount) + this.frameCount) % this.frameCount;
    this.anchorTime = this.now();
  }

  /** fractional frame position in [0, frameCount) */
  cursor(): number {
    if (!this.playing) return this.anchorCursor;
    const elapsed = (this.now() - this.anchorTime) / 1000;
    return (this.anchorCursor + elapsed * this.fps) % this.frameCount;
  }

  frameIndex(): number {
    return Math.floor(this.cursor());
  }
}
