// Session state: the latest confirmed snapshot, the transcript of
// confirmed moves, and the queue of erase animations still to play.
// The board is always rendered from these three pieces and nothing
// else, so a page reload that refetches the snapshot reconstructs the
// same view.

import type {
  CreateRequest,
  MoveJson,
  PlayerName,
  Snapshot,
} from "./api.js";

export interface TranscriptEntry {
  by: PlayerName;
  move: MoveJson;
  erased: number[][];
  plyCount: number;
}

export interface EraseAnimation {
  /** Erased segments, innermost first, exactly as the service reported. */
  spans: number[][];
  /** Word as it stood before the erasure, for rendering the outgoing tiles. */
  before: number[];
}

export type Phase = "humanTurn" | "engineTurn" | "animating" | "over";

export function moveLabel(move: MoveJson | null): string {
  if (move === null) return "resign";
  return "pass" in move ? "pass" : String(move.letter);
}

/** Word as it stood before the reported erasures were applied. */
export function wordBeforeErase(word: number[], spans: number[][]): number[] {
  // Segments were removed from the tail, innermost (shortest) first;
  // rebuilding appends them back in reverse order.
  let out = word.slice();
  for (let i = spans.length - 1; i >= 0; i--) {
    out = out.concat(spans[i]!);
  }
  return out;
}

export class SessionStore {
  snapshot: Snapshot | null = null;
  transcript: TranscriptEntry[] = [];
  private queue: EraseAnimation[] = [];

  constructor(public readonly create: CreateRequest) {}

  get humanRole(): PlayerName {
    return this.create.humanRole;
  }

  phase(): Phase {
    if (this.queue.length > 0) return "animating";
    if (!this.snapshot || this.snapshot.terminal !== null) return "over";
    return this.snapshot.turn === this.humanRole ? "humanTurn" : "engineTurn";
  }

  /** Erased tiles must animate out before the next input is accepted. */
  get inputLocked(): boolean {
    return this.queue.length > 0;
  }

  /** Confirmed move from either side; queues its erasure if any. */
  acceptMove(snap: Snapshot, by: PlayerName, move: MoveJson | null): void {
    if (move !== null) {
      this.transcript.push({
        by,
        move,
        erased: snap.lastErased,
        plyCount: snap.plyCount,
      });
    }
    if (snap.lastErased.length > 0) {
      this.queue.push({
        spans: snap.lastErased,
        before: wordBeforeErase(snap.word, snap.lastErased),
      });
    }
    this.snapshot = snap;
  }

  /** Fresh snapshot with no move attached (initial load or reload). */
  acceptSnapshot(snap: Snapshot): void {
    this.snapshot = snap;
  }

  nextAnimation(): EraseAnimation | undefined {
    return this.queue[0];
  }

  finishAnimation(): void {
    this.queue.shift();
  }

  /**
   * Transcript prefix for undo: everything up to and including the
   * given ply.  The caller forks a new session with the same creation
   * parameters (the seed pins the engine's randomness) and replays the
   * prefix move by move.
   */
  undoPrefix(toPly: number): TranscriptEntry[] {
    return this.transcript.filter((e) => e.plyCount <= toPly);
  }
}
