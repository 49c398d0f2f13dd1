/** Session view state and the controller that mutates it.
 *
 * Invariant: code sequences only ever come from the service. The diff
 * overlay is computed from two service-provided sequences; the UI never
 * edits codes locally and never derives codes from decoded motion.
 */

import type { ServiceApi } from "./api.js";
import { ApiError } from "./errors.js";
import { CodebookData, parseCodebookTable } from "./codebook.js";
import { DiffCell, diffCells } from "./diff.js";
import { CodeSequence, MotionData, parseCodes, parseMotion } from "./motion.js";

export interface HistoryEntry {
  instruction: string;
  codesText: string;
  codes: CodeSequence;
}

export interface ViewState {
  sessionId: string | null;
  description: string;
  codebook: CodebookData | null;
  history: HistoryEntry[];
  /** index into history of the entry being played back */
  viewing: number;
  motion: MotionData | null;
  /** cells that differ between the viewed entry and its predecessor */
  diff: DiffCell[];
  /** inclusive [start, end] step selection, or null for whole sequence */
  selection: [number, number] | null;
  editInFlight: boolean;
  banner: string | null;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    description: "",
    codebook: null,
    history: [],
    viewing: -1,
    motion: null,
    diff: [],
    selection: null,
    editInFlight: false,
    banner: null,
  };
}

export class SessionController {
  readonly state: ViewState;
  private readonly api: ServiceApi;
  private readonly onChange: () => void;

  constructor(api: ServiceApi, onChange: () => void = () => {}) {
    this.api = api;
    this.onChange = onChange;
    this.state = initialState();
  }

  async loadSession(sessionId: string): Promise<void> {
    const s = this.state;
    if (s.codebook === null) {
      const cb = await this.api.codebook();
      s.codebook = parseCodebookTable(cb.table);
    }
    const info = await this.api.getSession(sessionId);
    s.sessionId = info.session_id;
    s.description = info.description;
    s.history = info.history.map((h) => ({
      instruction: h.instruction,
      codesText: h.codes,
      codes: parseCodes(h.codes),
    }));
    s.viewing = s.history.length - 1;
    s.selection = null;
    s.banner = null;
    this.refreshDiff();
    await this.decodeViewing();
    this.onChange();
  }

  /** Apply an instruction to the latest codes. On failure the session state
   * is left exactly as it was, with only the banner set.
   */
  async applyEdit(instruction: string): Promise<void> {
    const s = this.state;
    if (s.editInFlight || s.sessionId === null || s.history.length === 0) return;
    s.editInFlight = true;
    s.banner = null;
    this.onChange();
    try {
      const result = await this.api.edit(s.sessionId, instruction, s.selection);
      // parse and diff before touching state, so a malformed response
      // cannot leave the session half updated
      const before = s.history[s.history.length - 1].codes;
      const after = parseCodes(result.codes);
      const diff = diffCells(before, after);
      const motion = result.motion !== undefined ? parseMotion(result.motion) : null;
      s.history.push({ instruction, codesText: result.codes, codes: after });
      s.viewing = s.history.length - 1;
      s.diff = diff;
      s.selection = null;
      if (motion !== null) {
        s.motion = motion;
      } else {
        await this.decodeViewing();
      }
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        s.banner = "edit in progress";
      } else if (err instanceof ApiError) {
        s.banner = err.message;
      } else {
        s.banner = (err as Error).message;
      }
    } finally {
      s.editInFlight = false;
      this.onChange();
    }
  }

  /** Switch playback to an older history entry. */
  async restore(index: number): Promise<void> {
    const s = this.state;
    if (index < 0 || index >= s.history.length) return;
    s.viewing = index;
    this.refreshDiff();
    await this.decodeViewing();
    this.onChange();
  }

  /** Record an inclusive step selection; arguments may come in either order. */
  selectRange(a: number, b: number): void {
    const s = this.state;
    const entry = s.history[s.viewing];
    if (!entry) return;
    const last = entry.codes.steps.length - 1;
    const lo = Math.max(0, Math.min(a, b));
    const hi = Math.min(last, Math.max(a, b));
    if (lo > hi) return;
    s.selection = [lo, hi];
    this.onChange();
  }

  clearSelection(): void {
    this.state.selection = null;
    this.onChange();
  }

  private refreshDiff(): void {
    const s = this.state;
    if (s.viewing > 0) {
      s.diff = diffCells(s.history[s.viewing - 1].codes, s.history[s.viewing].codes);
    } else {
      s.diff = [];
    }
  }

  private async decodeViewing(): Promise<void> {
    const s = this.state;
    const entry = s.history[s.viewing];
    if (!entry) {
      s.motion = null;
      return;
    }
    try {
      const result = await this.api.decode(entry.codesText);
      s.motion = parseMotion(result.motion);
    } catch (err) {
      s.motion = null;
      if (err instanceof ApiError && err.status === 404) {
        s.banner = "service has no decoder checkpoint; playback unavailable";
      } else {
        s.banner = (err as Error).message;
      }
    }
  }
}
