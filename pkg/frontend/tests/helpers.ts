/** Builders for the wire formats used across the test files. */

import { JOINT_NAMES, FRAME_VALUES, NUM_CATEGORIES } from "../src/motion.js";

export function motionText(frames: number[][], fps = 20): string {
  const lines = [
    "POSECODEC-MOTION v1",
    `fps=${fps}`,
    `joints=${JOINT_NAMES.join(",")}`,
  ];
  for (const frame of frames) {
    lines.push(frame.join(" "));
  }
  return lines.join("\n") + "\n";
}

/** A frame with every joint at the origin except pelvis height. */
export function flatFrame(pelvisY = 1): number[] {
  const frame = new Array(FRAME_VALUES).fill(0);
  frame[1] = pelvisY;
  return frame;
}

export function codesText(steps: number[][], l = 4, fps = 20): string {
  const lines = ["POSECODEC-CODES v1", `l=${l}`, `fps=${fps}`];
  steps.forEach((step, i) => {
    const flag = i === steps.length - 1 ? "E" : "-";
    lines.push(step.join(" ") + " " + flag);
  });
  return lines.join("\n") + "\n";
}

/** n steps of the full-width assignment, every category set to `value`. */
export function uniformSteps(n: number, value = 0, categories = NUM_CATEGORIES): number[][] {
  return Array.from({ length: n }, () => new Array(categories).fill(value));
}

export interface TableCategory {
  name: string;
  semantics: string[];
}

export function codebookTable(categories: TableCategory[]): string {
  const lines = ["global_id\tcategory\tsemantics\tthreshold_rule"];
  let gid = 0;
  for (const cat of categories) {
    for (const sem of cat.semantics) {
      lines.push(`${gid}\t${cat.name}\t${sem}\trule ${gid}`);
      gid += 1;
    }
  }
  return lines.join("\n") + "\n";
}
