/** Browser entry point: wires the session controller to the DOM.
 *
 * Query parameters:
 *   ?session=<id>   load this session on startup
 *   ?service=<url>  service base URL (default: same origin, via the proxy)
 */

import { ApiClient } from "./api.js";
import { SessionController } from "./state.js";
import { Player } from "./player.js";
import { renderSkeleton, Viewport } from "./skeleton.js";
import { cellKey, describeCell } from "./diff.js";

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("service") ?? "");

const canvas = document.getElementById("stage") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const sessionLabel = document.getElementById("session-label")!;
const description = document.getElementById("description")!;
const playButton = document.getElementById("play") as HTMLButtonElement;
const frameLabel = document.getElementById("frame-label")!;
const timeline = document.getElementById("timeline")!;
const selectionLabel = document.getElementById("selection-label")!;
const clearSelectionButton = document.getElementById("clear-selection") as HTMLButtonElement;
const instructionInput = document.getElementById("instruction") as HTMLInputElement;
const applyButton = document.getElementById("apply") as HTMLButtonElement;
const diffList = document.getElementById("diff-list")!;
const historyList = document.getElementById("history-list")!;
const loadForm = document.getElementById("load-form") as HTMLFormElement;
const sessionInput = document.getElementById("session-id") as HTMLInputElement;

let player: Player | null = null;

const controller = new SessionController(api, render);

function render(): void {
  const s = controller.state;

  banner.textContent = s.banner ?? "";
  banner.style.display = s.banner ? "block" : "none";

  sessionLabel.textContent = s.sessionId ?? "no session";
  description.textContent = s.description;

  if (s.motion !== null) {
    if (player === null || player.frameCount !== s.motion.frames.length || player.fps !== s.motion.fps) {
      const wasPlaying = player?.isPlaying() ?? true;
      player = new Player(s.motion.frames.length, s.motion.fps);
      if (wasPlaying) player.play();
    }
  } else {
    player = null;
  }
  playButton.disabled = player === null;
  playButton.textContent = player !== null && player.isPlaying() ? "Pause" : "Play";
  applyButton.disabled = s.editInFlight || s.sessionId === null || s.history.length === 0;
  applyButton.textContent = s.editInFlight ? "Applying..." : "Apply edit";

  renderTimeline();
  renderDiffPanel();
  renderHistory();
}

function renderTimeline(): void {
  const s = controller.state;
  timeline.textContent = "";
  const entry = s.history[s.viewing];
  if (!entry) {
    selectionLabel.textContent = "";
    return;
  }
  const diffSteps = new Set(s.diff.map((c) => c.step));
  for (let i = 0; i < entry.codes.steps.length; i++) {
    const cell = document.createElement("div");
    cell.className = "step-cell";
    cell.textContent = String(i);
    if (diffSteps.has(i)) cell.classList.add("changed");
    if (s.selection !== null && i >= s.selection[0] && i <= s.selection[1]) {
      cell.classList.add("selected");
    }
    const step = i;
    cell.addEventListener("mousedown", (ev) => {
      ev.preventDefault();
      dragAnchor = step;
      controller.selectRange(step, step);
    });
    cell.addEventListener("mouseenter", () => {
      if (dragAnchor !== null) controller.selectRange(dragAnchor, step);
    });
    timeline.appendChild(cell);
  }
  selectionLabel.textContent =
    s.selection === null
      ? "selection: whole sequence"
      : `selection: steps ${s.selection[0]} to ${s.selection[1]} (inclusive)`;
}

let dragAnchor: number | null = null;
window.addEventListener("mouseup", () => {
  dragAnchor = null;
});

function renderDiffPanel(): void {
  const s = controller.state;
  diffList.textContent = "";
  if (s.diff.length === 0) {
    const li = document.createElement("li");
    li.className = "muted";
    li.textContent = s.history.length > 1 ? "no cells changed" : "no edits yet";
    diffList.appendChild(li);
    return;
  }
  for (const cell of s.diff) {
    const li = document.createElement("li");
    const where = document.createElement("span");
    where.className = "cell-key";
    const name = s.codebook ? s.codebook.categories[cell.category].name : `category ${cell.category}`;
    where.textContent = `step ${cell.step}, ${name}`;
    li.appendChild(where);
    const what = document.createElement("span");
    what.textContent = s.codebook ? describeCell(s.codebook, cell) : `${cell.oldLocal} → ${cell.newLocal}`;
    if (s.codebook) li.title = `${cellKey(cell)}: ${describeCell(s.codebook, cell)}`;
    li.appendChild(what);
    diffList.appendChild(li);
  }
}

function renderHistory(): void {
  const s = controller.state;
  historyList.textContent = "";
  s.history.forEach((entry, i) => {
    const li = document.createElement("li");
    li.textContent = i === 0 ? "(initial)" : entry.instruction;
    if (i === s.viewing) li.classList.add("viewing");
    li.addEventListener("click", () => {
      void controller.restore(i);
    });
    historyList.appendChild(li);
  });
}

function drawLoop(): void {
  const vp: Viewport = {
    width: canvas.width,
    height: canvas.height,
    scale: 140,
    groundMargin: 30,
  };
  const s = controller.state;
  if (s.motion !== null && player !== null) {
    const frame = s.motion.frames[player.frameIndex()];
    renderSkeleton(ctx, frame, vp);
    frameLabel.textContent = `frame ${player.frameIndex() + 1} / ${s.motion.frames.length} at ${s.motion.fps} fps`;
  } else {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    frameLabel.textContent = "";
  }
  requestAnimationFrame(drawLoop);
}

playButton.addEventListener("click", () => {
  if (player === null) return;
  if (player.isPlaying()) {
    player.pause();
  } else {
    player.play();
  }
  playButton.textContent = player.isPlaying() ? "Pause" : "Play";
});

clearSelectionButton.addEventListener("click", () => controller.clearSelection());

applyButton.addEventListener("click", () => {
  const instruction = instructionInput.value.trim();
  if (instruction === "") return;
  void controller.applyEdit(instruction).then(() => {
    if (controller.state.banner === null) instructionInput.value = "";
  });
});

instructionInput.addEventListener("keydown", (ev) => {
  if (ev.key === "Enter" && !applyButton.disabled) applyButton.click();
});

loadForm.addEventListener("submit", (ev) => {
  ev.preventDefault();
  const id = sessionInput.value.trim();
  if (id === "") return;
  controller.loadSession(id).catch((err) => {
    controller.state.banner = (err as Error).message;
    render();
  });
});

const initialSession = params.get("session");
if (initialSession !== null) {
  sessionInput.value = initialSession;
  controller.loadSession(initialSession).catch((err) => {
    controller.state.banner = (err as Error).message;
    render();
  });
}

render();
drawLoop();
