"""Command-line harness: sampling, analysis, statistics and verification.

Exit codes: 0 ok, 1 usage, 2 precondition, 3 verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import IsingInterfaceError, PreconditionError
from .interface import Interface, read_interface, write_interface
from .lattice import Box, Region
from .maps import IsoParams, isolation_report, phi_delete, phi_iso, phi_swap, psi_delete, insert_column, witness, \
    witness_reconstruct
from .pillars import hgt, increments, pillar, restricted_pillar, split
from .sampler import Constraint, sample_conditional, sample_interfaces
from .spins import snapshot_bytes
from .stats import (
    AlphaTable, TailTable, alpha_estimate, gamma, gamma_in_corridor, m_star, max_stats, nested_excess_tail, pillar_tail,
)
from .walls import Decomposition, StandardWallCollection, read_collection, write_collection

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- config and provenance

def _provenance(cfg: dict) -> dict:
    """Config hash, seed and library version; output paths do not enter the hash."""
    core = {k: v for k, v in sorted(cfg.items()) if k not in ("out", "config", "func", "command")}
    text = json.dumps(core, sort_keys=True, default=str)
    return {"config": core, "config_hash": hashlib.sha256(text.encode()).hexdigest(),
            "seed": cfg.get("seed"), "version": __version__}


def _merge_config(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Flags override values from the JSON config file; unknown keys are usage errors."""
    cfg = vars(ns).copy()
    path = cfg.get("config")
    if path:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(doc, dict):
            raise UsageError("config must be a JSON object")
        actions = {a.dest: a for a in _sub_actions(parser, cfg["command"], cfg.get("kind"))}
        for key, value in doc.items():
            dest = key.replace("-", "_")
            if dest not in actions:
                raise UsageError(f"unknown config key {key!r}")
            if cfg.get(dest) is None or cfg.get(dest) == actions[dest].default:
                conv = actions[dest].type
                cfg[dest] = conv(value) if conv is not None and isinstance(value, str) else value
    missing = [a.dest for a in _sub_actions(parser, cfg["command"], cfg.get("kind")) if getattr(a, "needed", False) and cfg.get(a.dest) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return cfg


def _sub_actions(parser, command: str, kind: str | None = None) -> list:
    """Actions of a subcommand, including those of its chosen nested kind."""
    for a in parser._subparsers._group_actions:
        if command in a.choices:
            sub = a.choices[command]
            out = list(sub._actions)
            for b in sub._actions:
                if isinstance(b, argparse._SubParsersAction) and kind in b.choices:
                    out.extend(b.choices[kind]._actions)
            return out
    return []


def _needed(action):
    action.needed = True
    return action


def _face(text) -> tuple:
    """Base face from 'i,j': the unit square with lower-left corner (i, j)."""
    if isinstance(text, (list, tuple)):
        i, j = text
    else:
        try:
            i, j = (int(v) for v in str(text).split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected i,j but got {text!r}") from None
    return (2 * int(i) + 1, 2 * int(j) + 1)


def _int_range(text) -> list:
    """'1..3' or '1,2,3'."""
    if isinstance(text, list):
        return [int(v) for v in text]
    s = str(text)
    if ".." in s:
        a, b = s.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(v) for v in s.split(",")]


def _box(cfg: dict) -> Box:
    n = cfg["n"]
    m = cfg.get("m") or n
    H = cfg.get("H") or n
    return Box(n, m, H)


def _write_json(path: Path, doc) -> None:
    path.write_text(_dumps(doc, indent=1) + "\n")


def _clean(o):
    """Non-finite floats become null so every record is strict JSON."""
    if isinstance(o, float) and not math.isfinite(o):
        return None
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def _dumps(doc, **kw) -> str:
    return json.dumps(_clean(doc), sort_keys=True, default=_default, allow_nan=False, **kw)


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    raise TypeError(type(o).__name__)


def _emit(cfg: dict, record: dict) -> None:
    """JSONL record to --out (appended) or stdout."""
    line = _dumps(record)
    out = cfg.get("out")
    if out:
        p = Path(out)
        if p.suffix not in (".jsonl", ".json"):
            p.mkdir(parents=True, exist_ok=True)
            p = p / "records.jsonl"
        with open(p, "a") as fh:
            fh.write(line + "\n")
    else:
        print(line)


def _inputs(cfg: dict) -> list:
    paths = []
    for item in cfg.get("input") or []:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.isf")))
        else:
            paths.append(p)
    if not paths:
        raise PreconditionError("no input interface files")
    for p in paths:
        if not p.exists():
            raise PreconditionError(f"input file {p} does not exist")
    return paths


def _read(p) -> Interface:
    return read_interface(p, validate=True)


def _region_and_walls(cfg: dict, box: Box) -> tuple:
    """(S, W) from --constraint (a wall collection file with a region), or (None, None)."""
    path = cfg.get("constraint")
    if not path:
        return None, None
    W, S = read_collection(path)
    if W.box != box:
        raise PreconditionError("constraint box differs from the interface box")
    return S, W


# ---------------------------------------------------------------- sampling

def _chain_samples(args) -> list:
    box, beta, count, sweeps, burn, seed, stream, constraint_path = args
    if constraint_path:
        W, S = read_collection(constraint_path)
        stream_obj = sample_conditional(box, beta, Constraint(S, W), count, sweeps, burn, seed, stream)
    else:
        stream_obj = sample_interfaces(box, beta, count, sweeps, burn, seed, stream)
    out = []
    for I in stream_obj:
        out.append((snapshot_bytes(stream_obj.state.cfg, beta, seed), I))
    return out


def _split_counts(total: int, chains: int) -> list:
    base, extra = divmod(total, chains)
    return [base + (1 if c < extra else 0) for c in range(chains)]


def _run_chains(cfg: dict, box: Box, count: int, constraint_path=None) -> list:
    chains = max(1, int(cfg.get("chains") or 1))
    jobs = [(box, cfg["beta"], k, cfg["sweeps_between"], cfg["burn_in"], cfg["seed"], c, constraint_path)
            for c, k in enumerate(_split_counts(count, chains)) if k > 0]
    if chains == 1:
        return [r for job in jobs for r in _chain_samples(job)]
    with ProcessPoolExecutor(max_workers=chains) as ex:
        return [r for part in ex.map(_chain_samples, jobs) for r in part]


def cmd_sample(cfg: dict) -> int:
    box = _box(cfg)
    constraint = cfg.get("constraint") if cfg["command"] == "conditional-sample" else None
    if cfg["command"] == "conditional-sample":
        S, W = _region_and_walls(cfg, box)
        if S is None:
            raise PreconditionError("conditional sampling needs a constraint file with a region")
    results = _run_chains(cfg, box, cfg["samples"], constraint)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"provenance": _provenance(cfg), "box": box.to_json(), "files": []}
    for k, (snap, I) in enumerate(results):
        (out / f"snapshot_{k:05d}.isi").write_bytes(snap)
        write_interface(out / f"interface_{k:05d}.isf", I)
        manifest["files"].append({"snapshot": f"snapshot_{k:05d}.isi", "interface": f"interface_{k:05d}.isf",
                                  "faces": len(I), "excess": len(I) - box.n_base_faces})
    _write_json(out / "manifest.json", manifest)
    print(json.dumps({"written": len(results), "out": str(out)}))
    return EXIT_OK


# ---------------------------------------------------------------- analysis

def cmd_decompose(cfg: dict) -> int:
    prov = _provenance(cfg)
    for p in _inputs(cfg):
        I = _read(p)
        d = Decomposition(I)
        rec = {"input": str(p), "walls": len(d.walls), "ceilings": len(d.ceilings),
               "excess": [W.excess() for W in d.walls], "total_excess": len(I) - I.box.n_base_faces,
               "wall_faces": [len(W) for W in d.walls], "provenance": prov}
        if cfg.get("collection_dir"):
            cd = Path(cfg["collection_dir"])
            cd.mkdir(parents=True, exist_ok=True)
            write_collection(cd / (Path(p).stem + ".walls.json"), d.collection)
        _emit(cfg, rec)
    return EXIT_OK


def cmd_pillar(cfg: dict) -> int:
    prov = _provenance(cfg)
    x = cfg["x"]
    for p in _inputs(cfg):
        I = _read(p)
        S, W = _region_and_walls(cfg, I.box)
        P = restricted_pillar(I, x, S, W) if S is not None else pillar(I, x)
        sp = split(P)
        seq = increments(sp)
        rec = {"input": str(p), "x": list(x), "hgt": hgt(P), "cells": len(P.cells), "faces": len(P.faces),
               "base_cells": len(sp.base_cells), "cut_points": [list(c) for c in sp.cut_points],
               "increment_excesses": seq.excesses(), "provenance": prov}
        _emit(cfg, rec)
    return EXIT_OK


def cmd_maps(cfg: dict) -> int:
    prov = _provenance(cfg)
    p_iso = IsoParams(cfg["L"], cfg["h"])
    op = cfg["op"]
    x = cfg.get("x")
    outdir = Path(cfg["result_dir"]) if cfg.get("result_dir") else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for p in _inputs(cfg):
        I = _read(p)
        S, W = _region_and_walls(cfg, I.box)
        rec = {"input": str(p), "op": op, "provenance": prov}
        if op in ("phi-iso", "isolation", "psi-delete", "insert-column", "phi-swap") and x is None:
            raise UsageError(f"{op} needs --x")
        if op == "phi-iso":
            J, trace = phi_iso(I, x, S, W, p_iso)
            w = witness(I, J, x, trace)
            ok = witness_reconstruct(J, w, x, S, W, p_iso) == I
            failures += not ok
            rec.update({"trace": trace.to_json(), "excess": trace.excess, "witness_digest": w.digest(),
                        "witness_size": w.size, "witness_reconstructs": ok})
        elif op == "isolation":
            rec["report"] = isolation_report(I, x, S, W, p_iso).to_json()
            J = None
        elif op == "phi-delete":
            d = Decomposition(I)
            ys = cfg.get("walls_at") or []
            V = [w for w in d.walls if any(w.shape.nests(y) for y in ys)]
            J = phi_delete(V, I, W, d)
            rec["excess"] = len(I) - len(J)
        elif op == "psi-delete":
            J = psi_delete(I, x, S, W)
            rec["excess"] = len(I) - len(J)
        elif op == "insert-column":
            J = insert_column(I, x, cfg["height"], S, W)
            rec["excess"] = len(I) - len(J)
        elif op == "phi-swap":
            if not cfg.get("other") or cfg.get("x2") is None:
                raise UsageError("phi-swap needs --other and --x2")
            I2 = _read(cfg["other"])
            J, J2 = phi_swap(I, I2, x, cfg["x2"], S, W, p_iso)
            rec["face_total_before"] = len(I) + len(I2)
            rec["face_total_after"] = len(J) + len(J2)
            if outdir:
                write_interface(outdir / (Path(p).stem + ".swap2.isf"), J2)
        else:
            raise UsageError(f"unknown map {op}")
        if outdir and J is not None:
            write_interface(outdir / (Path(p).stem + f".{op}.isf"), J)
        _emit(cfg, rec)
    return EXIT_VERIFY if failures else EXIT_OK


# ---------------------------------------------------------------- stats

def _stat_samples(cfg: dict):
    """Interfaces from --input files, or sampled live when no input is given."""
    if cfg.get("input"):
        return [_read(p) for p in _inputs(cfg)]
    if cfg.get("n") is None or cfg.get("samples") is None:
        raise UsageError("give --input files or live sampling parameters --n and --samples")
    box = _box(cfg)
    return [I for _, I in _run_chains(cfg, box, cfg["samples"], cfg.get("constraint"))]


def _check_count(cfg: dict, got: int) -> None:
    need = cfg.get("min_samples") or 1
    if got < need:
        raise PreconditionError(f"insufficient samples: have {got}, need {need} (short by {need - got})")


def _write_table(cfg: dict, name: str, record: dict, csv_text: str) -> None:
    out = cfg.get("out")
    if out:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        with open(d / f"{name}.jsonl", "a") as fh:
            fh.write(_dumps(record) + "\n")
        prov = record["provenance"]
        header = f"# config_hash={prov['config_hash']} seed={prov['seed']} version={prov['version']}\n"
        (d / f"{name}.csv").write_text(header + csv_text)
    else:
        print(_dumps(record))


def cmd_stats(cfg: dict) -> int:
    kind = cfg["kind"]
    prov = _provenance(cfg)
    if kind == "alpha":
        if cfg.get("seed") is None:
            raise UsageError("alpha sampling needs --seed")
        box = _box(cfg)
        table = alpha_estimate(box, cfg["beta"], cfg["h"], cfg["samples"], cfg["seed"], cfg["sweeps_between"],
                               cfg["burn_in"])
        _check_count(cfg, cfg["samples"])
        rec = table.to_json(cfg["eps"])
        rec["provenance"] = prov
        _write_table(cfg, "alpha", rec, table.to_csv())
        return EXIT_VERIFY if rec["superadditivity_violations"] else EXIT_OK
    if kind == "mstar":
        path = cfg.get("alpha_file")
        if not path or not Path(path).exists():
            raise PreconditionError("mstar needs an existing --alpha-file")
        text = "".join(l for l in Path(path).read_text().splitlines(True) if not l.startswith("#"))
        table = AlphaTable.from_csv(text, cfg["beta"])
        s = cfg["s"]
        ms = m_star(s, table, cfg["beta"])
        g = gamma(s, table, cfg["beta"])
        rec = {"kind": "mstar", "s": s, "m_star": ms, "gamma": g,
               "gamma_in_corridor": gamma_in_corridor(g, cfg["beta"], cfg["eps"]), "provenance": prov}
        _emit(cfg, rec)
        return EXIT_OK
    samples = _stat_samples(cfg)
    _check_count(cfg, len(samples))
    box = samples[0].box
    S, W = _region_and_walls(cfg, box)
    if kind == "maxstats":
        ms = max_stats(samples, S, W)
        rec = ms.to_json()
        rec["good_event_frequency"] = {str(r): ms.good_event_frequency(r) for r in range(0, 41, 4)}
        rec["provenance"] = prov
        _write_table(cfg, "maxstats", rec, ms.to_csv())
        return EXIT_OK
    if kind == "tails":
        x = cfg.get("x")
        xs = [x] if x is not None else None
        tail, reach = pillar_tail(samples, xs, cfg["h_max"], S, W)
        nested = nested_excess_tail(samples, xs, S, W, cfg["r_max"])
        for name, t in (("pillar_tail", tail), ("reach_tail", reach), ("nested_excess_tail", nested)):
            rec = t.to_json()
            rec["name"] = name
            slope = t.fit_slope()
            rec["fit_slope"], rec["fit_intercept"], rec["fit_r2"] = slope
            rec["provenance"] = prov
            _write_table(cfg, name, rec, t.to_csv())
        return EXIT_OK
    raise UsageError(f"unknown stats kind {kind}")


# ---------------------------------------------------------------- verify

def cmd_verify(cfg: dict) -> int:
    from .verification import run

    only = cfg.get("only")
    results = run(cfg["level"], cfg["seed"], only=only, report=lambda r: print(r.line(), flush=True))
    if cfg.get("out"):
        _write_json(Path(cfg["out"]), {"provenance": _provenance(cfg), "results": [r.to_json() for r in results]})
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


# ---------------------------------------------------------------- parser

def _common_sampling(p, live_only: bool = False) -> None:
    p.add_argument("--n", type=int, help="box half-width (base is 2n x 2m columns)")
    p.add_argument("--m", type=int, help="box half-depth (default n)")
    p.add_argument("--H", type=int, help="box half-height (default n)")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, help="required for every randomized run")
    p.add_argument("--sweeps-between", type=int, default=10)
    p.add_argument("--burn-in", type=int, default=200)
    p.add_argument("--chains", type=int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ising-interfaces", description="Sampling and decomposition of 3D Ising interfaces.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    for name, help_ in (("sample", "sample interfaces"), ("conditional-sample", "sample with fixed exterior walls")):
        p = sub.add_parser(name, help=help_)
        _common_sampling(p)
        p.add_argument("--out", help="output directory")
        p.add_argument("--config")
        if name == "conditional-sample":
            _needed(p.add_argument("--constraint", help="wall collection JSON with a region"))
        for dest in ("n", "samples", "seed", "out"):
            _needed(next(a for a in p._actions if a.dest == dest))
        p.set_defaults(func=cmd_sample)

    p = sub.add_parser("decompose", help="walls and ceilings of interface files")
    p.add_argument("--input", nargs="+")
    p.add_argument("--collection-dir", help="also write standard wall collections here")
    p.add_argument("--out")
    p.add_argument("--config")
    _needed(p._actions[1])
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("pillar", help="pillar at a base face")
    p.add_argument("--input", nargs="+")
    p.add_argument("--x", type=_face, help="base face i,j (lower-left corner)")
    p.add_argument("--constraint")
    p.add_argument("--out")
    p.add_argument("--config")
    for a in p._actions[1:3]:
        _needed(a)
    p.set_defaults(func=cmd_pillar)

    p = sub.add_parser("maps", help="apply a map to interface files")
    p.add_argument("--input", nargs="+")
    ops = p.add_mutually_exclusive_group()
    for op in ("phi-iso", "isolation", "phi-delete", "psi-delete", "insert-column", "phi-swap"):
        ops.add_argument(f"--{op}", dest="op", action="store_const", const=op)
    p.add_argument("--x", type=_face)
    p.add_argument("--x2", type=_face)
    p.add_argument("--other", help="second interface for phi-swap")
    p.add_argument("--walls-at", type=_face, nargs="*", help="phi-delete: walls nesting these faces")
    p.add_argument("--height", type=int, default=1, help="insert-column height")
    p.add_argument("--L", type=int, default=3)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--constraint")
    p.add_argument("--result-dir", help="write resulting interfaces here")
    p.add_argument("--out")
    p.add_argument("--config")
    _needed(p._actions[1])
    _needed(next(a for a in p._actions if a.dest == "op"))
    p.set_defaults(func=cmd_maps)

    p = sub.add_parser("stats", help="estimators")
    kinds = p.add_subparsers(dest="kind", parser_class=_Parser)
    for kind in ("alpha", "mstar", "maxstats", "tails"):
        k = kinds.add_parser(kind)
        k.add_argument("--out", help="output directory for JSONL and CSV")
        k.add_argument("--config")
        k.add_argument("--min-samples", type=int, default=1)
        if kind == "mstar":
            k.add_argument("--s", type=float)
            k.add_argument("--alpha-file")
            k.add_argument("--beta", type=float, default=1.0)
            k.add_argument("--eps", type=float, default=1.0)
            _needed(k._actions[-4])
            continue
        _common_sampling(k)
        if kind == "alpha":
            k.add_argument("--h", type=_int_range, default=[1, 2, 3])
            k.add_argument("--eps", type=float, default=1.0, help="superadditivity slack beyond the CI widths")
            for dest in ("n", "samples", "seed"):
                _needed(next(a for a in k._actions if a.dest == dest))
            continue
        k.add_argument("--input", nargs="+")
        k.add_argument("--constraint")
        if kind == "tails":
            k.add_argument("--x", type=_face)
            k.add_argument("--h-max", type=int, default=4)
            k.add_argument("--r-max", type=int, default=40)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("verify", help="property suites and corridors")
    p.add_argument("level", choices=("quick", "full"))
    p.add_argument("--seed", type=int, default=1, help="fixed default so reports are reproducible")
    p.add_argument("--only", type=_int_range)
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--config")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None or (ns.command == "stats" and getattr(ns, "kind", None) is None):
            raise UsageError("a subcommand is required")
        cfg = _merge_config(ns, parser)
        if cfg["command"] in ("sample", "conditional-sample") and cfg.get("seed") is None:
            raise UsageError("--seed is required")
        if cfg["command"] == "stats" and cfg["kind"] in ("maxstats", "tails") and not cfg.get("input") \
                and cfg.get("seed") is None:
            raise UsageError("--seed is required for live sampling")
        return cfg["func"](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IsingInterfaceError, OSError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
