// Browser entry point: form handling, the request loop against the
// service, and DOM rendering of the pure view models.

import {
  ApiClient,
  ApiError,
  ServiceUnreachableError,
} from "./api.js";
import type {
  CreateRequest,
  HintResponse,
  ModeName,
  MoveJson,
  PlayerName,
} from "./api.js";
import {
  buildBoard,
  hintRows,
  letterButtons,
  logRows,
  passVisible,
} from "./board.js";
import { SessionStore } from "./state.js";

const ERASE_ANIMATION_MS = 350;

// ?api=http://127.0.0.1:8000 points at a service on another port
const api = new ApiClient(new URLSearchParams(window.location.search).get("api") ?? "");
let store: SessionStore | null = null;
let hintsOn = false;
let lastHints: HintResponse | null = null;

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function engineRole(): PlayerName {
  return store!.humanRole === "BEN" ? "ANN" : "BEN";
}

function showError(message: string | null): void {
  const banner = el<HTMLDivElement>("error");
  banner.textContent = message ?? "";
  banner.hidden = message === null;
}

function reportFailure(err: unknown): void {
  if (err instanceof ServiceUnreachableError) {
    showError("Service unreachable. Is `thuegames serve` running?");
  } else if (err instanceof ApiError) {
    showError(`${err.code}: ${err.message}`);
  } else {
    showError(String(err));
  }
}

// ---------------------------------------------------------------- render

function render(): void {
  if (!store || !store.snapshot) return;
  const snap = store.snapshot;
  const animation = store.nextAnimation() ?? null;
  const model = buildBoard(snap, animation);

  const board = el<HTMLDivElement>("board");
  board.replaceChildren(
    ...model.tiles.map((tile) => {
      const div = document.createElement("div");
      div.className = tile.className;
      div.textContent = tile.letter.toString(16);
      return div;
    }),
  );
  el<HTMLSpanElement>("turn").textContent = model.turnLabel;
  el<HTMLSpanElement>("ply").textContent = `ply ${model.plyCount}`;
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = model.banner ?? "";
  banner.hidden = model.banner === null;

  renderControls();
  renderLog();
  renderHints();

  if (animation) {
    // let the outgoing tiles play before settling the snapshot
    window.setTimeout(() => {
      store?.finishAnimation();
      render();
    }, ERASE_ANIMATION_MS);
  }
}

function renderControls(): void {
  const snap = store!.snapshot!;
  const humansTurn = store!.phase() === "humanTurn";
  const letters = el<HTMLDivElement>("letters");
  letters.replaceChildren(
    ...letterButtons(snap, store!.humanRole).map((b) => {
      const btn = document.createElement("button");
      btn.textContent = b.letter.toString(16);
      btn.className = `letter L${b.letter}`;
      btn.disabled = b.disabled || !humansTurn;
      if (b.tooltip) btn.title = b.tooltip;
      btn.addEventListener("click", () => submit({ letter: b.letter }));
      return btn;
    }),
  );
  const pass = el<HTMLButtonElement>("pass");
  pass.hidden = !passVisible(snap, store!.humanRole);
  pass.disabled = !humansTurn;
}

function renderLog(): void {
  const rows = logRows(store!.transcript);
  const log = el<HTMLTableSectionElement>("log");
  log.replaceChildren(
    ...rows.map((row) => {
      const tr = document.createElement("tr");
      const undo = document.createElement("button");
      undo.textContent = "undo to here";
      undo.className = "undo";
      undo.addEventListener("click", () => undoTo(row.ply));
      const cells = [String(row.ply), row.by, row.label, row.erased];
      for (const text of cells) {
        const td = document.createElement("td");
        td.textContent = text;
        tr.appendChild(td);
      }
      tr.appendChild(document.createElement("td")).appendChild(undo);
      return tr;
    }),
  );
}

function renderHints(): void {
  const panel = el<HTMLDivElement>("hints");
  panel.hidden = !hintsOn;
  if (!hintsOn || !lastHints) {
    panel.replaceChildren();
    return;
  }
  panel.replaceChildren(
    ...hintRows(lastHints.moves).map((row) => {
      const div = document.createElement("div");
      div.className = row.unsafe ? "hint unsafe" : "hint";
      const bar = document.createElement("span");
      bar.className = "bar";
      bar.style.width = `${row.barPercent}%`;
      const text = document.createElement("span");
      text.textContent =
        `${row.label}: ${row.weightText}` + (row.flags ? ` (${row.flags})` : "");
      div.append(bar, text);
      return div;
    }),
  );
}

// ------------------------------------------------------------- game flow

async function refreshHints(): Promise<void> {
  if (!hintsOn || !store?.snapshot || store.phase() !== "humanTurn") {
    lastHints = null;
    return;
  }
  try {
    lastHints = await api.hint(store.snapshot.id);
  } catch (err) {
    lastHints = null;
    reportFailure(err);
  }
}

async function runEngineIfDue(): Promise<void> {
  while (store && store.phase() === "engineTurn") {
    const res = await api.engineMove(store.snapshot!.id);
    store.acceptMove(res.state, engineRole(), res.move);
    render();
    if (store.inputLocked) return; // render's timer continues the drain
  }
  await refreshHints();
  render();
}

async function submit(move: MoveJson): Promise<void> {
  if (!store || store.phase() !== "humanTurn" || store.inputLocked) return;
  showError(null);
  try {
    const snap = await api.postMove(store.snapshot!.id, move);
    store.acceptMove(snap, store.humanRole, move);
    render();
    await runEngineIfDue();
  } catch (err) {
    reportFailure(err);
  }
}

async function startGame(req: CreateRequest): Promise<void> {
  showError(null);
  try {
    const snap = await api.createGame(req);
    store = new SessionStore(req);
    store.acceptSnapshot(snap);
    window.location.hash = snap.id;
    window.sessionStorage.setItem(snap.id, JSON.stringify(req));
    render();
    await runEngineIfDue();
  } catch (err) {
    reportFailure(err);
  }
}

/** Undo as "fork a fresh session and replay the transcript prefix". */
async function undoTo(ply: number): Promise<void> {
  if (!store || store.inputLocked) return;
  showError(null);
  const prefix = store.undoPrefix(ply);
  const oldId = store.snapshot?.id;
  try {
    const snap = await api.createGame(store.create);
    const fork = new SessionStore(store.create);
    fork.acceptSnapshot(snap);
    for (const entry of prefix) {
      if (entry.by === fork.humanRole) {
        const after = await api.postMove(snap.id, entry.move);
        fork.acceptMove(after, entry.by, entry.move);
      } else {
        // The seed is part of the creation parameters, so the engine
        // retraces its own moves.
        const res = await api.engineMove(snap.id);
        fork.acceptMove(res.state, entry.by, res.move);
      }
    }
    // drop queued animations accumulated during replay
    while (fork.nextAnimation()) fork.finishAnimation();
    store = fork;
    window.location.hash = snap.id;
    window.sessionStorage.setItem(snap.id, JSON.stringify(store.create));
    if (oldId) void api.deleteGame(oldId).catch(() => undefined);
    await refreshHints();
    render();
    await runEngineIfDue();
  } catch (err) {
    reportFailure(err);
  }
}

/** A reload rebuilds the identical board from the stored snapshot. */
async function resume(id: string): Promise<void> {
  const saved = window.sessionStorage.getItem(id);
  if (!saved) return;
  try {
    const snap = await api.getGame(id);
    store = new SessionStore(JSON.parse(saved) as CreateRequest);
    store.acceptSnapshot(snap);
    render();
    await runEngineIfDue();
  } catch {
    window.location.hash = "";
  }
}

// ----------------------------------------------------------------- setup

function readForm(): CreateRequest {
  const mode = el<HTMLSelectElement>("mode").value as ModeName;
  const k = Number(el<HTMLSelectElement>("k").value);
  const humanRole = el<HTMLSelectElement>("role").value as PlayerName;
  const req: CreateRequest = {
    mode,
    k,
    humanRole,
    options: { seed: Math.floor(Math.random() * 2 ** 31) },
  };
  if (humanRole === "ANN") {
    req.options!.benStrategy =
      el<HTMLSelectElement>("ben").value as "random" | "weightmin" | "script3";
  }
  return req;
}

export function init(): void {
  el<HTMLFormElement>("setup").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const k = Number(el<HTMLSelectElement>("k").value);
    if (!Number.isInteger(k) || k < 2 || k > 16) {
      showError("k must be between 2 and 16");
      return;
    }
    void startGame(readForm());
  });
  el<HTMLSelectElement>("role").addEventListener("change", () => {
    el<HTMLLabelElement>("ben-row").hidden =
      el<HTMLSelectElement>("role").value !== "ANN";
  });
  el<HTMLButtonElement>("pass").addEventListener("click", () => {
    void submit({ pass: true });
  });
  el<HTMLButtonElement>("hint-toggle").addEventListener("click", () => {
    hintsOn = !hintsOn;
    void refreshHints().then(render);
  });
  const id = window.location.hash.slice(1);
  if (id) void resume(id);
}

init();
