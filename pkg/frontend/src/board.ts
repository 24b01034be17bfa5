// Pure render models.  Everything here maps (snapshot, animation,
// hints) to plain view objects; the DOM layer just prints them.  No
// legality decisions are made on the client, the only derived values
// are display hints (which tile to grey out, where the winning square
// sits).

import type { HintEntry, PlayerName, Snapshot } from "./api.js";
import { moveLabel } from "./state.js";
import type { EraseAnimation, TranscriptEntry } from "./state.js";

export interface TileView {
  letter: number;
  className: string;
}

export interface BoardModel {
  tiles: TileView[];
  turnLabel: string;
  banner: string | null;
  plyCount: number;
}

export interface LetterButton {
  letter: number;
  disabled: boolean;
  tooltip: string | null;
}

export interface LogRow {
  ply: number;
  by: PlayerName;
  label: string;
  erased: string;
}

export interface HintRow {
  label: string;
  weightText: string;
  barPercent: number;
  unsafe: boolean;
  flags: string;
}

function wordText(letters: number[]): string {
  return letters.map((b) => b.toString(16)).join("");
}

/** Period of the square the word now ends with, or 0 if none. */
export function winningSquarePeriod(word: number[]): number {
  for (let q = 1; 2 * q <= word.length; q++) {
    let equal = true;
    for (let i = 0; i < q; i++) {
      if (word[word.length - 2 * q + i] !== word[word.length - q + i]) {
        equal = false;
        break;
      }
    }
    if (equal) return q;
  }
  return 0;
}

const BANNERS: Record<string, string> = {
  BEN_WON: "Ben wins: the word ends with a square",
  LENGTH_TARGET_REACHED: "Ann wins: the word reached the length target",
  ENGINE_RESIGNED: "Engine resigns: no safe move left",
};

export function buildBoard(
  snap: Snapshot,
  animation: EraseAnimation | null,
): BoardModel {
  let letters: number[];
  let classAt: (i: number) => string;

  if (animation) {
    // Render the pre-erase word with the outgoing tiles marked; the
    // settled snapshot takes over once the animation is done.
    letters = animation.before;
    const settled = letters.length -
      animation.spans.reduce((n, s) => n + s.length, 0);
    classAt = (i) => (i >= settled ? "tile erasing" : "tile");
  } else {
    letters = snap.word;
    const q = snap.terminal === "BEN_WON" ? winningSquarePeriod(letters) : 0;
    classAt = (i) => {
      if (q === 0 || i < letters.length - 2 * q) return "tile";
      return i < letters.length - q
        ? "tile square-first"
        : "tile square-second";
    };
  }

  const tiles = letters.map((letter, i) => ({
    letter,
    className: `${classAt(i)} L${letter}`,
  }));

  let banner: string | null = null;
  if (!animation && snap.terminal !== null) {
    banner = BANNERS[snap.terminal] ?? snap.terminal;
    if (snap.resignReason) banner += ` (${snap.resignReason})`;
  }

  return {
    tiles,
    turnLabel: snap.terminal === null ? `${snap.turn} to move` : "game over",
    banner,
    plyCount: snap.plyCount,
  };
}

export function letterButtons(
  snap: Snapshot,
  humanRole: PlayerName,
): LetterButton[] {
  const last = snap.word.length > 0 ? snap.word[snap.word.length - 1] : null;
  const repeatBarred =
    snap.mode === "hard" && humanRole === "BEN" && last !== null;
  const buttons: LetterButton[] = [];
  for (let letter = 0; letter < snap.k; letter++) {
    const barred = repeatBarred && letter === last;
    buttons.push({
      letter,
      disabled: barred,
      tooltip: barred ? "cannot repeat" : null,
    });
  }
  return buttons;
}

export function passVisible(snap: Snapshot, humanRole: PlayerName): boolean {
  return snap.mode === "hard" && humanRole === "BEN";
}

export function logRows(transcript: TranscriptEntry[]): LogRow[] {
  return transcript.map((e) => ({
    ply: e.plyCount,
    by: e.by,
    label: moveLabel(e.move),
    erased: e.erased.map(wordText).join(", "),
  }));
}

export function hintRows(moves: HintEntry[]): HintRow[] {
  const top = Math.max(1, ...moves.map((m) => m.weight ?? 0));
  return moves.map((m) => {
    const flags = [
      m.completesSquare ? "completes a square" : "",
      m.leavesThreat ? "leaves a threat" : "",
      m.erased.length > 0 ? "erases" : "",
    ].filter(Boolean).join(", ");
    return {
      label: moveLabel(m.move),
      weightText: m.weight === null ? "-" : String(m.weight),
      barPercent: m.weight === null ? 0 : Math.round((m.weight / top) * 100),
      unsafe: !m.safe,
      flags,
    };
  });
}
