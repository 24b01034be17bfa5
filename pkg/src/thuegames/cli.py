"""Command-line front end.

Subcommands cover the whole pipeline: ``lambda`` builds automata,
``solve`` produces certificates, ``verify`` and ``beta`` check them,
``game`` searches forced wins, ``oracle`` measures weighted growth,
``play`` runs a terminal game and ``serve`` starts the HTTP service.

Exit codes: 0 success (and PASS for checks), 1 a check FAILed, 2 usage
error, 3 a resource limit (memory budget, search or solver budget).
Rationals cross this boundary only as ``num/den`` strings.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import kernels
from .automaton import (DEAD, DEFAULT_MEMORY_BUDGET, ResourceLimitError,
                        build_lambda, dump as dump_lambda, out_profile)
from .certificate import (beta_interval, check_beta, format_rational,
                          make_certificate, parse_rational, read_certificate,
                          to_json, verify_certificate, write_certificate)
from .games import (PASS, Player, ann_move, apply_move, legal_moves,
                    make_ben_strategy, new_game, NoSafeMoveError)
from .modes import Mode
from .oracle import OracleBudgetError, weighted_growth_oracle
from .provision import build_policy, policy_from_file
from .search import SearchBudgetError, solve_forced_win
from .solver import (SolverConfig, SolverConvergenceError,
                     SolverDivergenceError, solve)
from .words import PeriodRange, format_word, parse_word

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _parse_bytes(text: str) -> int:
    s = text.strip().upper()
    factor = 1
    for suffix, f in (("GIB", 1 << 30), ("G", 1 << 30), ("MIB", 1 << 20),
                      ("M", 1 << 20), ("KIB", 1 << 10), ("K", 1 << 10)):
        if s.endswith(suffix):
            factor = f
            s = s[: -len(suffix)]
            break
    return int(float(s) * factor)


def _budget(args: argparse.Namespace) -> int | None:
    if getattr(args, "big_memory", False):
        return None
    return _parse_bytes(args.memory_budget)


def _mode(name: str) -> Mode:
    return Mode.from_name(name)


def _emit(args: argparse.Namespace, doc: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(doc, indent=2))
    else:
        print(text)


def cmd_lambda(args: argparse.Namespace) -> int:
    rng = PeriodRange(args.pmin, args.pmax)
    t0 = time.time()
    lam = build_lambda(args.k, rng, _budget(args))
    elapsed = time.time() - t0
    dead = int((lam.cls_target == DEAD).sum())
    if args.dump:
        dump_lambda(lam, args.dump)
    doc = {
        "command": "lambda", "k": args.k, "pmin": args.pmin, "pmax": args.pmax,
        "stateCount": len(lam), "fingerprint": f"{lam.fingerprint:#018x}",
        "classCount": int(lam.cls_target.shape[0]), "deadCount": dead,
        "buildSeconds": round(elapsed, 3),
        "dump": args.dump,
    }
    lines = [f"automaton k={args.k} periods {args.pmin}..{args.pmax}: "
             f"{len(lam)} states, {doc['classCount']} classes ({dead} dead), "
             f"fingerprint {doc['fingerprint']}, built in {elapsed:.3f}s"]
    if args.states:
        lines += ["  " + format_word(w) for w in lam.words]
    if args.dump:
        lines.append(f"wrote {args.dump}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(max_iters=args.max_iters, tol=args.tol,
                        m_rel=args.m_rel, M_rel=args.M_rel, scale=args.scale,
                        init=args.init, seed=args.seed,
                        mean_over=args.mean_over, log_every=args.log_every)


def cmd_solve(args: argparse.Namespace) -> int:
    mode = _mode(args.mode)
    if mode is Mode.ERASE:
        print("solve targets the nonrepetitive or hard recurrence", file=sys.stderr)
        return EXIT_USAGE
    pmin = args.pmin if args.pmin is not None else mode.pmin
    rng = PeriodRange(pmin, args.pmax)
    t0 = time.time()
    lam = build_lambda(args.k, rng, _budget(args))
    result = solve(lam, mode, _solver_config(args))
    beta = parse_rational(args.beta) if args.beta else None
    cert = make_certificate(lam, mode, result, beta)
    elapsed = time.time() - t0
    write_certificate(cert, args.output)
    if args.json_mirror:
        with open(args.json_mirror, "w") as fh:
            fh.write(to_json(cert))
    doc = {
        "command": "solve", "mode": mode.value, "k": args.k,
        "pmin": pmin, "pmax": args.pmax, "stateCount": len(lam),
        "alpha": format_rational(cert.alpha), "gamma": format_rational(cert.gamma),
        "beta": format_rational(cert.beta), "m": cert.m, "M": cert.M,
        "iterations": result.iterations, "backend": result.backend,
        "seconds": round(elapsed, 3), "output": args.output,
    }
    _emit(args, doc,
          f"solved {mode.value} k={args.k} periods {pmin}..{args.pmax}: "
          f"alpha {doc['alpha']} (~{float(cert.alpha):.6f}), "
          f"gamma {doc['gamma']} (~{float(cert.gamma):.6f}), "
          f"coefficients in [{cert.m}, {cert.M}], beta {doc['beta']}, "
          f"{result.iterations} iterations on the {result.backend} backend "
          f"in {elapsed:.2f}s -> {args.output}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    cert = read_certificate(args.certificate)
    lam = build_lambda(cert.k, cert.rng, _budget(args))
    report = verify_certificate(cert, lam)
    beta = parse_rational(args.beta) if args.beta else (
        cert.beta if cert.beta > 1 else None)
    beta_holds = None
    if beta is not None:
        beta_holds = check_beta(cert.mode, cert.alpha, cert.gamma,
                                cert.pmax, beta)
    passed = report.passed and beta_holds is not False
    doc = {
        "command": "verify", "certificate": args.certificate,
        "mode": cert.mode.value, "k": cert.k,
        "alpha": format_rational(cert.alpha),
        "gamma": format_rational(cert.gamma),
        "passed": passed,
        "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in report.checks],
        "beta": None if beta is None else
                {"value": format_rational(beta), "holds": beta_holds},
    }
    lines = [report.render()]
    if beta is not None:
        lines.append(f"  [{'ok' if beta_holds else 'FAIL'}] growth at beta "
                     f"{format_rational(beta)}")
    lines.append("PASS" if passed else "FAIL")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK if passed else EXIT_FAIL


def cmd_beta(args: argparse.Namespace) -> int:
    mode = _mode(args.mode)
    alpha = parse_rational(args.alpha)
    gamma = parse_rational(args.gamma)
    if args.interval:
        span = beta_interval(mode, alpha, gamma, args.p,
                             parse_rational(args.resolution))
        doc = {"command": "beta", "interval":
               None if span is None else [format_rational(span[0]),
                                          format_rational(span[1])]}
        if span is None:
            _emit(args, doc, "no feasible beta on the grid")
            return EXIT_FAIL
        _emit(args, doc, f"feasible beta spans [{format_rational(span[0])}, "
                         f"{format_rational(span[1])}] "
                         f"(~[{float(span[0]):.3f}, {float(span[1]):.3f}])")
        return EXIT_OK
    beta = parse_rational(args.beta)
    holds = check_beta(mode, alpha, gamma, args.p, beta)
    doc = {"command": "beta", "beta": format_rational(beta), "holds": holds}
    _emit(args, doc, f"growth at beta {format_rational(beta)}: "
                     f"{'PASS' if holds else 'FAIL'}")
    return EXIT_OK if holds else EXIT_FAIL


def cmd_game_solve(args: argparse.Namespace) -> int:
    mode = _mode(args.mode)
    t0 = time.time()
    result = solve_forced_win(mode, args.k, args.max_plies, args.budget)
    elapsed = time.time() - t0
    doc = {
        "command": "game-solve", "mode": mode.value, "k": args.k,
        "maxPlies": args.max_plies, "outcome": result.outcome,
        "depth": result.depth, "nodes": result.nodes,
        "strategySize": len(result.strategy) if result.strategy else 0,
        "seconds": round(elapsed, 3),
    }
    if result.outcome == "BEN_WINS":
        text = (f"BEN WINS {mode.value} over {args.k} letters within "
                f"{result.depth} plies ({result.nodes} nodes, "
                f"{doc['strategySize']} scripted positions, {elapsed:.2f}s)")
    else:
        text = (f"no forced win for Ben within {args.max_plies} plies "
                f"({result.nodes} nodes, {elapsed:.2f}s)")
    _emit(args, doc, text)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    mode = _mode(args.mode)
    policy = (policy_from_file(args.cert, mode, _budget(args)) if args.cert
              else build_policy(mode, args.k, _budget(args)))
    beta = parse_rational(args.beta) if args.beta else None
    runs = []
    ok_all = True
    for spec in args.phi:
        name, _, seed_text = spec.partition(":")
        seed = int(seed_text) if seed_text else 0
        phi = make_ben_strategy(name, mode, args.k, policy, seed)
        rep = weighted_growth_oracle(mode, args.k, policy, phi, args.n_max,
                                     args.set_budget)
        entry = {
            "phi": name, "seed": seed,
            "sizes": [r.size for r in rep.rounds],
            "weights": [r.weight for r in rep.rounds],
            "baseWeight": rep.base_weight,
            "ratios": [format_rational(q) for q in rep.ratios],
            "minRatio": format_rational(rep.min_ratio()) if rep.ratios else None,
        }
        if beta is not None:
            entry["betaOk"] = bool(rep.ratios) and rep.min_ratio() >= beta
            ok_all = ok_all and entry["betaOk"]
        runs.append(entry)
    doc = {"command": "oracle", "mode": mode.value, "k": args.k,
           "nMax": args.n_max, "runs": runs,
           "beta": format_rational(beta) if beta is not None else None}
    lines = []
    for e in runs:
        flag = "" if beta is None else ("  PASS" if e["betaOk"] else "  FAIL")
        lines.append(f"phi={e['phi']}:{e['seed']} sizes={e['sizes']} "
                     f"minRatio={e['minRatio']}{flag}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK if ok_all else EXIT_FAIL


def cmd_play(args: argparse.Namespace) -> int:
    mode = _mode(args.mode)
    human = Player.ANN if args.role == "ann" else Player.BEN
    policy = None
    if human is Player.BEN or args.ben == "weightmin":
        policy = (policy_from_file(args.cert, mode, _budget(args)) if args.cert
                  else build_policy(mode, args.k, _budget(args)))
    ben = None
    if human is Player.ANN:
        ben = make_ben_strategy(args.ben, mode, args.k, policy, args.seed)
    state = new_game(mode, args.k, args.length_target)
    print(f"{mode.value} over {args.k} letters; you are "
          f"{'Ann' if human is Player.ANN else 'Ben'}; letters are 0..{args.k - 1}"
          + ("; 'pass' to pass" if mode is Mode.HARD and human is Player.BEN else ""))
    while not state.terminal:
        print(f"[ply {state.ply:3}] word: {format_word(state.word)}")
        if state.turn is human:
            raw = input(f"your move ({state.turn.value}): ").strip().lower()
            if raw in {"q", "quit", "exit"}:
                return EXIT_OK
            try:
                move = PASS if raw == "pass" else parse_word(raw)[0]
                state = apply_move(state, move)
            except (ValueError, IndexError) as exc:
                print(f"  rejected: {exc}")
                continue
        elif state.turn is Player.ANN:
            try:
                a = ann_move(state, policy, args.lookahead)
            except NoSafeMoveError as exc:
                print(f"engine resigns: {exc}")
                return EXIT_OK
            state = apply_move(state, a)
            print(f"  engine (Ann) plays {format_word(bytes([a]))}")
        else:
            move = ben(state.word)
            state = apply_move(state, move)
            print(f"  engine (Ben) plays "
                  f"{'pass' if move is PASS else format_word(bytes([move]))}")
        if state.history and state.history[-1].erased:
            cuts = ", ".join(format_word(e) for e in state.history[-1].erased)
            print(f"  erased: {cuts}")
    print(f"[ply {state.ply:3}] word: {format_word(state.word)}")
    print(f"game over: {state.terminal}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(cert_paths=args.cert, memory_budget=_budget(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thuegames",
        description="square-free game automata, certificates and engines "
                    f"(kernel backend: {kernels.BACKEND})")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker pool size; results are identical for any "
                             "value (kernels run sequentially)")
    parser.add_argument("--memory-budget", default=str(DEFAULT_MEMORY_BUDGET),
                        help="construction budget in bytes (K/M/G suffixes), "
                             "default 8G")
    parser.add_argument("--big-memory", action="store_true",
                        help="lift the memory budget entirely")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lambda", help="build the square-prefix automaton")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pmin", type=int, default=1)
    p.add_argument("--pmax", type=int, required=True)
    p.add_argument("--dump", help="write a TGLAM1 container")
    p.add_argument("--states", action="store_true", help="list state words")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("solve", help="solve weights and write a certificate")
    p.add_argument("--mode", required=True, choices=["nonrep", "hard"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pmax", "--p", type=int, required=True, dest="pmax")
    p.add_argument("--pmin", type=int, default=None,
                   help="defaults to the mode's period floor")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--json-mirror", help="also write the JSON mirror")
    p.add_argument("--beta", help="store this beta instead of the interval middle")
    p.add_argument("--m-rel", type=float, default=0.42)
    p.add_argument("--M-rel", type=float, default=1.1)
    p.add_argument("--scale", type=int, default=10000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--init", choices=["uniform", "random"], default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mean-over", choices=["nonzero", "all"], default="nonzero")
    p.add_argument("--log-every", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="re-check a certificate exactly")
    p.add_argument("certificate")
    p.add_argument("--beta", help="also test growth at this rational")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("beta", help="growth inequality checks without a certificate")
    p.add_argument("--mode", required=True, choices=["nonrep", "hard"])
    p.add_argument("--alpha", required=True)
    p.add_argument("--gamma", required=True)
    p.add_argument("--p", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--beta")
    g.add_argument("--interval", action="store_true")
    p.add_argument("--resolution", default="1/1000")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_beta)

    pg = sub.add_parser("game", help="game-tree questions")
    gsub = pg.add_subparsers(dest="game_command", required=True)
    p = gsub.add_parser("solve", help="search for a forced Ben win")
    p.add_argument("--mode", required=True, choices=["nonrep", "hard"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-plies", type=int, required=True)
    p.add_argument("--budget", type=int, default=20_000_000,
                   help="search node budget")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_game_solve)

    p = sub.add_parser("oracle", help="measure weighted growth against fixed Ben play")
    p.add_argument("--mode", required=True, choices=["nonrep", "hard"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--cert", help="certificate file; defaults to solving on the fly")
    p.add_argument("--phi", nargs="+", default=["weightmin"],
                   help="strategies, e.g. weightmin random:0 random:1")
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--beta", help="require every ratio to reach this rational")
    p.add_argument("--set-budget", type=int, default=2_000_000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("play", help="play in the terminal")
    p.add_argument("--mode", required=True, choices=["nonrep", "erase", "hard"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--role", choices=["ann", "ben"], default="ben",
                   help="your side; the engine plays the other")
    p.add_argument("--cert", help="certificate file for the engine")
    p.add_argument("--ben", choices=["random", "weightmin", "script3"],
                   default="random", help="engine strategy when you are Ann")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lookahead", type=int, default=4)
    p.add_argument("--length-target", type=int, default=64)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("serve", help="run the HTTP play service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--cert", action="append", default=[],
                   help="preload a certificate file (repeatable)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except (ResourceLimitError, SearchBudgetError, OracleBudgetError,
            SolverConvergenceError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, SolverDivergenceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
