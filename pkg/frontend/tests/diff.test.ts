import { describe, expect, it } from "vitest";

import { parseCodebookTable } from "../src/codebook.js";
import { cellKey, describeCell, diffCells } from "../src/diff.js";
import { SchemaError } from "../src/errors.js";
import { parseCodes } from "../src/motion.js";
import { codebookTable, codesText, uniformSteps } from "./helpers.js";

function seq(steps: number[][]) {
  return parseCodes(codesText(steps));
}

describe("diffCells", () => {
  it("returns no cells for identical sequences", () => {
    const steps = uniformSteps(4, 2);
    expect(diffCells(seq(steps), seq(steps))).toEqual([]);
  });

  it("reports exactly the changed cells with old and new locals", () => {
    const before = uniformSteps(5, 1);
    const after = uniformSteps(5, 1);
    after[2][18] = 5;
    after[3][18] = 5;
    after[3][0] = 9;
    const cells = diffCells(seq(before), seq(after));
    expect(cells).toEqual([
      { step: 2, category: 18, oldLocal: 1, newLocal: 5 },
      { step: 3, category: 0, oldLocal: 1, newLocal: 9 },
      { step: 3, category: 18, oldLocal: 1, newLocal: 5 },
    ]);
  });

  it("rejects sequences whose step counts differ", () => {
    expect(() => diffCells(seq(uniformSteps(3)), seq(uniformSteps(4)))).toThrow(SchemaError);
    expect(() => diffCells(seq(uniformSteps(3)), seq(uniformSteps(4)))).toThrow(/step count/);
  });

  it("rejects steps whose category counts differ", () => {
    const a = parseCodes(codesText([[1, 2, 3]]), 3);
    const b = parseCodes(codesText([[1, 2]]), 2);
    expect(() => diffCells(a, b)).toThrow(/category counts/);
  });
});

describe("cellKey", () => {
  it("is unique per step and category", () => {
    expect(cellKey({ step: 2, category: 18 })).toBe("2:18");
    expect(cellKey({ step: 21, category: 8 })).not.toBe(cellKey({ step: 2, category: 18 }));
  });
});

describe("describeCell", () => {
  it("formats old and new semantics with an arrow", () => {
    const cb = parseCodebookTable(
      codebookTable([{ name: "knee flexion", semantics: ["straight", "slightly bent", "bent"] }]),
    );
    const text = describeCell(cb, { step: 0, category: 0, oldLocal: 0, newLocal: 2 });
    expect(text).toBe("straight → bent");
  });
});
