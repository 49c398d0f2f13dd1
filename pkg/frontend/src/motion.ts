/** Read-only parsers for the service's motion and code text formats.
 *
 * The client never serializes or mutates either format; every state
 * change round-trips through the service, so only parsing lives here.
 */

import { SchemaError } from "./errors.js";

export const MOTION_MAGIC = "POSECODEC-MOTION v1";
export const CODES_MAGIC = "POSECODEC-CODES v1";

export const JOINT_NAMES = [
  "pelvis",
  "left_hip",
  "right_hip",
  "spine1",
  "left_knee",
  "right_knee",
  "spine2",
  "left_ankle",
  "right_ankle",
  "spine3",
  "left_foot",
  "right_foot",
  "neck",
  "left_collar",
  "right_collar",
  "head",
  "left_shoulder",
  "right_shoulder",
  "left_elbow",
  "right_elbow",
  "left_wrist",
  "right_wrist",
] as const;

export const NUM_JOINTS = JOINT_NAMES.length;
export const FRAME_VALUES = NUM_JOINTS * 3;
export const NUM_CATEGORIES = 70;

export interface MotionData {
  fps: number;
  /** one Float64Array of 66 values (x, y, z per joint) per frame */
  frames: Float64Array[];
}

export interface CodeStep {
  /** one local code index per category */
  assignment: number[];
  isEnd: boolean;
}

export interface CodeSequence {
  downsample: number;
  fps: number;
  steps: CodeStep[];
}

export function parseMotion(text: string): MotionData {
  const lines = text.split(/\r?\n/);
  if (lines[0] !== MOTION_MAGIC) {
    throw new SchemaError(`line 1: expected header ${JSON.stringify(MOTION_MAGIC)}`);
  }
  if (lines.length < 3 || !lines[1]?.startsWith("fps=") || !lines[2]?.startsWith("joints=")) {
    throw new SchemaError("expected fps= and joints= header lines");
  }
  const fps = Number(lines[1].slice(4));
  if (!Number.isFinite(fps) || fps <= 0) {
    throw new SchemaError(`line 2: bad fps value ${JSON.stringify(lines[1].slice(4))}`);
  }
  const joints = lines[2].slice(7).split(",");
  if (joints.length !== NUM_JOINTS || joints.some((j, i) => j !== JOINT_NAMES[i])) {
    throw new SchemaError(`line 3: joint list does not match the ${NUM_JOINTS}-joint layout`);
  }
  const frames: Float64Array[] = [];
  for (let i = 3; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    const fields = line.split(/\s+/);
    if (fields.length !== FRAME_VALUES) {
      throw new SchemaError(
        `frame ${frames.length}: expected ${FRAME_VALUES} values, got ${fields.length}`,
      );
    }
    const frame = new Float64Array(FRAME_VALUES);
    for (let k = 0; k < FRAME_VALUES; k++) {
      const v = Number(fields[k]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`frame ${frames.length}: non-finite value ${JSON.stringify(fields[k])}`);
      }
      frame[k] = v;
    }
    frames.push(frame);
  }
  if (frames.length === 0) throw new SchemaError("motion has no frames");
  return { fps, frames };
}

export function parseCodes(text: string, numCategories: number = NUM_CATEGORIES): CodeSequence {
  const lines = text.split(/\r?\n/);
  if (lines[0] !== CODES_MAGIC) {
    throw new SchemaError(`line 1: expected header ${JSON.stringify(CODES_MAGIC)}`);
  }
  if (lines.length < 3 || !lines[1]?.startsWith("l=") || !lines[2]?.startsWith("fps=")) {
    throw new SchemaError("expected l= and fps= header lines");
  }
  const downsample = Number(lines[1].slice(2));
  const fps = Number(lines[2].slice(4));
  if (!Number.isInteger(downsample) || downsample < 1) {
    throw new SchemaError(`line 2: bad downsample value ${JSON.stringify(lines[1].slice(2))}`);
  }
  if (!Number.isFinite(fps) || fps <= 0) {
    throw new SchemaError(`line 3: bad fps value ${JSON.stringify(lines[2].slice(4))}`);
  }
  const steps: CodeStep[] = [];
  for (let i = 3; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    const fields = line.split(/\s+/);
    if (fields.length !== numCategories + 1) {
      throw new SchemaError(
        `step ${steps.length}: expected ${numCategories} indices plus end flag, got ${fields.length} fields`,
      );
    }
    const flag = fields[numCategories];
    if (flag !== "E" && flag !== "-") {
      throw new SchemaError(`step ${steps.length}: end flag must be 'E' or '-', got ${JSON.stringify(flag)}`);
    }
    const assignment: number[] = [];
    for (let c = 0; c < numCategories; c++) {
      const v = Number(fields[c]);
      if (!Number.isInteger(v) || v < 0) {
        throw new SchemaError(`step ${steps.length}: malformed index ${JSON.stringify(fields[c])}`);
      }
      assignment.push(v);
    }
    steps.push({ assignment, isEnd: flag === "E" });
  }
  if (steps.length === 0) throw new SchemaError("code sequence has no steps");
  return { downsample, fps, steps };
}
