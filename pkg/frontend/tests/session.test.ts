// Scripted sessions against the real play service: a child python
// process serves, the test drives it through the same ApiClient and
// SessionStore the browser uses.

import { spawn } from "node:child_process";
import type { ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import type { MoveJson, Snapshot } from "../src/api.js";
import { SessionStore, wordBeforeErase } from "../src/state.js";

const PORT = 18731;
const BASE = `http://127.0.0.1:${PORT}`;
const api = new ApiClient(BASE);

let service: ChildProcess;

async function serviceUp(): Promise<boolean> {
  try {
    const res = await fetch(`${BASE}/v1/games/__probe__`);
    return res.status === 404;
  } catch {
    return false;
  }
}

beforeAll(async () => {
  service = spawn(
    "python3",
    ["-m", "thuegames.cli", "serve", "--host", "127.0.0.1",
     "--port", String(PORT)],
    { cwd: "..", stdio: ["ignore", "ignore", "pipe"] },
  );
  let stderr = "";
  service.stderr?.on("data", (chunk) => { stderr += chunk; });

  const deadline = Date.now() + 90_000;
  while (!(await serviceUp())) {
    if (service.exitCode !== null) {
      throw new Error(`service exited early:\n${stderr}`);
    }
    if (Date.now() > deadline) {
      throw new Error(`service did not come up:\n${stderr}`);
    }
    await new Promise((r) => setTimeout(r, 300));
  }
});

afterAll(() => {
  service?.kill();
});

/** Deterministic pseudo-random ints for the scripted player. */
function lcg(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (s * 1664525 + 1013904223) >>> 0;
    return s;
  };
}

function drain(store: SessionStore): void {
  while (store.nextAnimation()) store.finishAnimation();
}

describe("scripted sessions", () => {
  it("plays 50 plies as Ben in hard k=6 without protocol errors", async () => {
    const create = {
      mode: "hard" as const,
      k: 6,
      humanRole: "BEN" as const,
      options: { seed: 7, lengthTarget: 400 },
    };
    const store = new SessionStore(create);
    store.acceptSnapshot(await api.createGame(create));
    const rand = lcg(42);

    while (store.snapshot!.plyCount < 50) {
      const snap = store.snapshot!;
      expect(snap.terminal).toBeNull();
      // the hard game never erases; the animation queue must stay empty
      expect(snap.lastErased).toEqual([]);
      expect(store.inputLocked).toBe(false);

      if (snap.turn === "ANN") {
        const res = await api.engineMove(snap.id);
        expect(res.move).not.toBeNull();
        store.acceptMove(res.state, "ANN", res.move);
        continue;
      }

      // Ben hunts for a winning square first; with a sound engine the
      // hint list never offers one.
      const hints = await api.hint(snap.id);
      expect(hints.turn).toBe("BEN");
      expect(hints.moves.some((m) => "pass" in m.move)).toBe(true);
      const winning = hints.moves.find((m) => m.completesSquare);
      let move: MoveJson;
      if (winning) {
        move = winning.move;
      } else if (snap.plyCount % 7 === 6) {
        move = { pass: true };
      } else {
        const last = snap.word[snap.word.length - 1];
        const legal = Array.from({ length: 6 }, (_, a) => a)
          .filter((a) => a !== last);
        move = { letter: legal[rand() % legal.length]! };
      }
      const after = await api.postMove(snap.id, move);
      store.acceptMove(after, "BEN", move);
      expect(after.plyCount).toBe(snap.plyCount + 1);
    }

    // engine Ann survived the whole scripted session
    expect(store.snapshot!.terminal).toBeNull();
    expect(store.snapshot!.plyCount).toBeGreaterThanOrEqual(50);
    expect(store.transcript.length).toBeGreaterThan(0);
    await api.deleteGame(store.snapshot!.id);
  });

  it("queues an animation for every erased span the service reports", async () => {
    const create = {
      mode: "erase" as const,
      k: 3,
      humanRole: "ANN" as const,
      options: { seed: 3, lengthTarget: 200, benStrategy: "script3" as const },
    };
    const store = new SessionStore(create);
    store.acceptSnapshot(await api.createGame(create));

    let erasesSeen = 0;
    for (let round = 0; round < 15; round++) {
      let snap = store.snapshot!;
      expect(snap.terminal).toBeNull();

      // repeating the last letter forces a period-1 square, which the
      // erase game immediately takes back
      const letter = snap.word.length > 0
        ? snap.word[snap.word.length - 1]!
        : 0;
      const wordBefore = snap.word.slice();
      const after = await api.postMove(snap.id, { letter });
      store.acceptMove(after, "ANN", { letter });

      if (after.lastErased.length > 0) {
        erasesSeen++;
        const anim = store.nextAnimation()!;
        expect(anim.spans).toEqual(after.lastErased);
        expect(anim.before).toEqual([...wordBefore, letter]);
        expect(wordBeforeErase(after.word, after.lastErased))
          .toEqual(anim.before);
      }
      drain(store);

      snap = store.snapshot!;
      if (snap.terminal !== null) break;
      const res = await api.engineMove(snap.id);
      store.acceptMove(res.state, "BEN", res.move);
      if (res.state.lastErased.length > 0) {
        const anim = store.nextAnimation()!;
        expect(anim.spans).toEqual(res.state.lastErased);
      }
      drain(store);
    }

    expect(erasesSeen).toBeGreaterThanOrEqual(14);
    await api.deleteGame(store.snapshot!.id);
  });

  it("undo forks a session that replays the transcript prefix", async () => {
    const create = {
      mode: "hard" as const,
      k: 6,
      humanRole: "BEN" as const,
      options: { seed: 123, lengthTarget: 400 },
    };
    const store = new SessionStore(create);
    store.acceptSnapshot(await api.createGame(create));

    const wordAt = new Map<number, number[]>();
    while (store.snapshot!.plyCount < 6) {
      const snap = store.snapshot!;
      if (snap.turn === "ANN") {
        const res = await api.engineMove(snap.id);
        store.acceptMove(res.state, "ANN", res.move);
      } else {
        // next letter up is always legal under the no-repeat rule
        const letter = (snap.word[snap.word.length - 1]! + 1) % 6;
        const after = await api.postMove(snap.id, { letter });
        store.acceptMove(after, "BEN", { letter });
      }
      wordAt.set(store.snapshot!.plyCount, store.snapshot!.word.slice());
    }

    const prefix = store.undoPrefix(4);
    expect(prefix).toHaveLength(4);

    const forkSnap = await api.createGame(store.create);
    const fork = new SessionStore(store.create);
    fork.acceptSnapshot(forkSnap);
    for (const entry of prefix) {
      if (entry.by === "BEN") {
        const after = await api.postMove(forkSnap.id, entry.move);
        fork.acceptMove(after, "BEN", entry.move);
      } else {
        const res = await api.engineMove(forkSnap.id);
        // deterministic engine retraces its own line
        expect(res.move).toEqual(entry.move);
        fork.acceptMove(res.state, "ANN", res.move);
      }
    }

    expect(fork.snapshot!.plyCount).toBe(4);
    expect(fork.snapshot!.word).toEqual(wordAt.get(4));
    await api.deleteGame(store.snapshot!.id);
    await api.deleteGame(fork.snapshot!.id);
  });
});
