import { describe, expect, it } from "vitest";

import { parseCodebookTable, semanticsFor } from "../src/codebook.js";
import { SchemaError } from "../src/errors.js";
import { codebookTable } from "./helpers.js";

const TABLE = codebookTable([
  { name: "knee flexion", semantics: ["straight", "slightly bent", "bent"] },
  { name: "hand height", semantics: ["low", "high"] },
]);

describe("parseCodebookTable", () => {
  it("groups consecutive rows sharing a name into categories", () => {
    const cb = parseCodebookTable(TABLE);
    expect(cb.numCodes).toBe(5);
    expect(cb.categories).toHaveLength(2);
    expect(cb.categories[0]).toMatchObject({ name: "knee flexion", offset: 0 });
    expect(cb.categories[0].semantics).toEqual(["straight", "slightly bent", "bent"]);
    expect(cb.categories[1]).toMatchObject({ name: "hand height", offset: 3 });
    expect(cb.categories[1].semantics).toEqual(["low", "high"]);
    expect(cb.categories[1].rules).toEqual(["rule 3", "rule 4"]);
  });

  it("rejects a missing or altered header", () => {
    expect(() => parseCodebookTable("id\tname\n0\tx\n")).toThrow(SchemaError);
    expect(() => parseCodebookTable(TABLE.replace("global_id", "globalid"))).toThrow(SchemaError);
  });

  it("rejects non-consecutive global ids", () => {
    const broken = TABLE.replace(/^3\t/m, "7\t");
    expect(() => parseCodebookTable(broken)).toThrow(/consecutive/);
  });

  it("rejects rows with the wrong column count", () => {
    const broken = TABLE.replace("\trule 2", "");
    expect(() => parseCodebookTable(broken)).toThrow(/4 columns/);
  });

  it("rejects an empty table", () => {
    expect(() => parseCodebookTable("global_id\tcategory\tsemantics\tthreshold_rule\n")).toThrow(
      /no codes/,
    );
  });
});

describe("semanticsFor", () => {
  it("returns the text for a category-local pair", () => {
    const cb = parseCodebookTable(TABLE);
    expect(semanticsFor(cb, 0, 2)).toBe("bent");
    expect(semanticsFor(cb, 1, 0)).toBe("low");
  });

  it("throws on out-of-range lookups", () => {
    const cb = parseCodebookTable(TABLE);
    expect(() => semanticsFor(cb, 2, 0)).toThrow(SchemaError);
    expect(() => semanticsFor(cb, 0, 3)).toThrow(SchemaError);
    expect(() => semanticsFor(cb, 0, -1)).toThrow(SchemaError);
  });
});
