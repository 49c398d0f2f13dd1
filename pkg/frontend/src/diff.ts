/** Cell-level diff between two code sequences.
 *
 * Both inputs always come from the service (session history and edit
 * responses); the overlay is never derived from motion data, so the
 * highlighted cells are exactly what the service changed.
 */

import { SchemaError } from "./errors.js";
import type { CodebookData } from "./codebook.js";
import { semanticsFor } from "./codebook.js";
import type { CodeSequence } from "./motion.js";

export interface DiffCell {
  step: number;
  category: number;
  oldLocal: number;
  newLocal: number;
}

export function diffCells(before: CodeSequence, after: CodeSequence): DiffCell[] {
  if (before.steps.length !== after.steps.length) {
    throw new SchemaError(
      `edit changed the step count (${before.steps.length} to ${after.steps.length})`,
    );
  }
  const cells: DiffCell[] = [];
  for (let t = 0; t < before.steps.length; t++) {
    const a = before.steps[t].assignment;
    const b = after.steps[t].assignment;
    if (a.length !== b.length) {
      throw new SchemaError(`step ${t}: category counts differ (${a.length} vs ${b.length})`);
    }
    for (let c = 0; c < a.length; c++) {
      if (a[c] !== b[c]) {
        cells.push({ step: t, category: c, oldLocal: a[c], newLocal: b[c] });
      }
    }
  }
  return cells;
}

export function cellKey(cell: Pick<DiffCell, "step" | "category">): string {
  return `${cell.step}:${cell.category}`;
}

/** "old semantics → new semantics" for tooltips and the diff panel. */
export function describeCell(cb: CodebookData, cell: DiffCell): string {
  const oldText = semanticsFor(cb, cell.category, cell.oldLocal);
  const newText = semanticsFor(cb, cell.category, cell.newLocal);
  return `${oldText} → ${newText}`;
}
