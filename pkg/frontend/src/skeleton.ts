/** Stick-figure rendering: a fixed 21-bone tree over the 22 joints,
 * orthographic front projection, left-side bones visually distinct
 * (edit instructions are chirality-sensitive).
 */

import { SchemaError } from "./errors.js";
import { FRAME_VALUES } from "./motion.js";

export interface Bone {
  from: number;
  to: number;
  left: boolean;
}

// indices follow JOINT_NAMES order
export const BONES: readonly Bone[] = [
  { from: 0, to: 1, left: true }, // pelvis - left_hip
  { from: 0, to: 2, left: false }, // pelvis - right_hip
  { from: 1, to: 4, left: true }, // left_hip - left_knee
  { from: 2, to: 5, left: false }, // right_hip - right_knee
  { from: 4, to: 7, left: true }, // left_knee - left_ankle
  { from: 5, to: 8, left: false }, // right_knee - right_ankle
  { from: 7, to: 10, left: true }, // left_ankle - left_foot
  { from: 8, to: 11, left: false }, // right_ankle - right_foot
  { from: 0, to: 3, left: false }, // pelvis - spine1
  { from: 3, to: 6, left: false }, // spine1 - spine2
  { from: 6, to: 9, left: false }, // spine2 - spine3
  { from: 9, to: 12, left: false }, // spine3 - neck
  { from: 12, to: 15, left: false }, // neck - head
  { from: 9, to: 13, left: true }, // spine3 - left_collar
  { from: 9, to: 14, left: false }, // spine3 - right_collar
  { from: 13, to: 16, left: true }, // left_collar - left_shoulder
  { from: 14, to: 17, left: false }, // right_collar - right_shoulder
  { from: 16, to: 18, left: true }, // left_shoulder - left_elbow
  { from: 17, to: 19, left: false }, // right_shoulder - right_elbow
  { from: 18, to: 20, left: true }, // left_elbow - left_wrist
  { from: 19, to: 21, left: false }, // right_elbow - right_wrist
];

export const LEFT_COLOR = "#e05c2a";
export const RIGHT_COLOR = "#3a6ea5";
export const JOINT_COLOR = "#222222";

export type PaintStyle = string | CanvasGradient | CanvasPattern;

/** Subset of CanvasRenderingContext2D the renderer touches; tests pass a recorder. */
export interface DrawContext {
  lineWidth: number;
  strokeStyle: PaintStyle;
  fillStyle: PaintStyle;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  arc(x: number, y: number, r: number, start: number, end: number): void;
  fill(): void;
  clearRect(x: number, y: number, w: number, h: number): void;
}

export interface Viewport {
  width: number;
  height: number;
  /** pixels per meter */
  scale: number;
  /** pixels between the canvas bottom and ground level (y = 0) */
  groundMargin: number;
}

/** Front view: the figure's left appears on the viewer's right. */
export function project(frame: ArrayLike<number>, joint: number, vp: Viewport): [number, number] {
  const x = frame[joint * 3];
  const y = frame[joint * 3 + 1];
  return [vp.width / 2 - x * vp.scale, vp.height - vp.groundMargin - y * vp.scale];
}

export function renderSkeleton(ctx: DrawContext, frame: ArrayLike<number>, vp: Viewport): void {
  if (frame.length !== FRAME_VALUES) {
    throw new SchemaError(`frame must have ${FRAME_VALUES} values, got ${frame.length}`);
  }
  for (let i = 0; i < frame.length; i++) {
    if (!Number.isFinite(frame[i])) {
      throw new SchemaError(`frame value ${i} is not finite`);
    }
  }
  ctx.clearRect(0, 0, vp.width, vp.height);

  // ground line
  ctx.strokeStyle = "#bbbbbb";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(0, vp.height - vp.groundMargin);
  ctx.lineTo(vp.width, vp.height - vp.groundMargin);
  ctx.stroke();

  for (const bone of BONES) {
    const [x0, y0] = project(frame, bone.from, vp);
    const [x1, y1] = project(frame, bone.to, vp);
    ctx.strokeStyle = bone.left ? LEFT_COLOR : RIGHT_COLOR;
    ctx.lineWidth = bone.left ? 4 : 3;
    ctx.beginPath();
    ctx.moveTo(x0, y0);
    ctx.lineTo(x1, y1);
    ctx.stroke();
  }

  ctx.fillStyle = JOINT_COLOR;
  for (let j = 0; j < frame.length / 3; j++) {
    const [x, y] = project(frame, j, vp);
    ctx.beginPath();
    ctx.arc(x, y, 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }
}
