/** Parses the code table served by GET /v1/codebook into category
 * structure. Rows arrive ordered by global id; categories appear as
 * consecutive runs sharing a name, in category-id order.
 */

import { SchemaError } from "./errors.js";

export interface CodebookCategory {
  name: string;
  /** global id of this category's first code */
  offset: number;
  /** semantics string per local code index */
  semantics: string[];
  /** threshold rule per local code index */
  rules: string[];
}

export interface CodebookData {
  categories: CodebookCategory[];
  numCodes: number;
}

const HEADER = "global_id\tcategory\tsemantics\tthreshold_rule";

export function parseCodebookTable(table: string): CodebookData {
  const lines = table.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines[0] !== HEADER) {
    throw new SchemaError("code table is missing its header row");
  }
  const categories: CodebookCategory[] = [];
  let current: CodebookCategory | null = null;
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split("\t");
    if (fields.length !== 4) {
      throw new SchemaError(`code table row ${i}: expected 4 columns, got ${fields.length}`);
    }
    const [idText, name, semantics, rule] = fields;
    const globalId = Number(idText);
    if (globalId !== i - 1) {
      throw new SchemaError(`code table row ${i}: global ids must be consecutive from 0`);
    }
    if (current === null || current.name !== name) {
      current = { name, offset: globalId, semantics: [], rules: [] };
      categories.push(current);
    }
    current.semantics.push(semantics);
    current.rules.push(rule);
  }
  const numCodes = lines.length - 1;
  if (numCodes === 0) throw new SchemaError("code table has no codes");
  return { categories, numCodes };
}

export function semanticsFor(cb: CodebookData, category: number, local: number): string {
  const spec = cb.categories[category];
  if (!spec || local < 0 || local >= spec.semantics.length) {
    throw new SchemaError(`no code at category ${category}, local ${local}`);
  }
  return spec.semantics[local];
}
