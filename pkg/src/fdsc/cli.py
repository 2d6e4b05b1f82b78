"""Command-line pipeline: synthesize, verify, scaling studies, group networks.

Exit codes: 0 success / verification pass, 1 verification or oracle failure,
2 usage or file-format errors, 3 strategy incompatible with the code.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import css, groups, synth, verify


def _load_code(spec: str, size: int | None) -> css.CssCode:
    if spec.startswith("file:"):
        path = Path(spec[5:])
        return css.parse_code(path.read_text())
    if spec not in ("ghz", "toric", "xcube", "haah"):
        raise css.ParseError(f"unknown code {spec!r}")
    if size is None:
        raise css.ParseError("--size is required for built-in families")
    return css.build_family(spec, size)


def _json_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def cmd_synth(args) -> int:
    try:
        code = _load_code(args.code, args.size)
    except (css.ParseError, css.InvalidSize, css.CommutationViolation,
            OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        circ = synth.synthesize(code, args.strategy, seed=args.seed,
                                restarts=args.restarts)
    except (synth.IncompatibleStrategy, synth.SizeNotPowerOfTwo) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    if args.out:
        Path(args.out).write_text(synth.serialize_circuit(circ) + "\n")
    print(_json_line({"gate_count": circ.gate_count,
                      "s_size": len(circ.plus_qubits),
                      "n_qubits": circ.n_qubits}))
    return 0


def cmd_verify(args) -> int:
    try:
        code = _load_code(args.code, args.size)
        circ = synth.parse_circuit(Path(args.circuit).read_text())
    except (css.ParseError, css.InvalidSize, css.CommutationViolation,
            ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        report = verify.verify_circuit(code, circ)
        oracle_ok = True
        if args.oracle:
            oracle_ok = verify.statevector_check(code, circ)
    except (verify.TooLarge, verify.InvalidLayer, verify.IndexOutOfRange,
            verify.DimensionMismatch) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(report.to_json())
    if not report.passed or not oracle_ok:
        if not oracle_ok:
            print("error: state-vector oracle mismatch", file=sys.stderr)
        return 1
    return 0


def fit_loglog(sizes, counts) -> dict:
    """Ordinary least squares of log(count) on log(size)."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    sst = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / sst if sst else 1.0
    return {"slope": float(slope), "intercept": float(intercept),
            "r_squared": r2}


def cmd_scaling(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows = []
    failures = 0
    for L in sizes:
        t0 = time.perf_counter()
        try:
            code = css.build_family(args.code, L) if not args.code.startswith(
                "file:") else _load_code(args.code, L)
            circ = synth.synthesize(code, args.strategy, seed=args.seed)
            if args.verify_upto and L <= args.verify_upto:
                report = verify.verify_circuit(code, circ)
                if not report.passed:
                    raise RuntimeError(f"verification failed: {report.to_json()}")
        except (synth.IncompatibleStrategy, synth.SizeNotPowerOfTwo) as e:
            print(f"error: {e}", file=sys.stderr)
            return 3
        except Exception as e:  # per-size failure; run continues
            print(f"size {L} failed: {e}", file=sys.stderr)
            failures += 1
            continue
        wall_ms = (time.perf_counter() - t0) * 1000.0
        rows.append({"family": code.family, "strategy": args.strategy, "L": L,
                     "n_qubits": code.n_qubits,
                     "s_size": len(circ.plus_qubits),
                     "gate_count": circ.gate_count, "wall_ms": wall_ms})
    rows.sort(key=lambda r: r["L"])
    lines = ["family,strategy,L,n_qubits,s_size,gate_count,wall_ms"]
    for r in rows:
        lines.append(f"{r['family']},{r['strategy']},{r['L']},{r['n_qubits']},"
                     f"{r['s_size']},{r['gate_count']},{r['wall_ms']:.3f}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    result = {"rows": len(rows), "failures": failures}
    if len(rows) >= 3:
        result["fit"] = fit_loglog([r["L"] for r in rows],
                                   [r["gate_count"] for r in rows])
    print(_json_line(result))
    return 0 if not failures else 1


def _load_group(spec: str):
    if spec.startswith("dihedral:"):
        return groups.make_dihedral(int(spec.split(":", 1)[1]))
    if spec.startswith("abelian:"):
        return groups.make_abelian([int(x) for x in spec.split(":", 1)[1].split(",")])
    if spec.startswith("file:"):
        return groups.parse_group(Path(spec[5:]).read_text())
    raise groups.ParseError(f"unknown group spec {spec!r}")


def cmd_groups(args) -> int:
    try:
        group, series = _load_group(args.group)
        lengths = [int(x) for x in args.lengths.split(",") if x]
    except (groups.ParseError, groups.InvalidSize, groups.GroupStructureError,
            ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print("n,depth,ancillas")
    all_ok = True
    for row in groups.depth_report(group, series, lengths):
        print(f"{row['n']},{row['depth']},{row['ancillas']}")
    for n in lengths:
        if group.order ** n <= 100_000:
            ok = groups.exhaustive_check(group, series, n)
        else:
            ok = groups.random_check(group, series, n, args.trials, seed=0)
        if not ok:
            print(f"mismatch against table fold at n={n}", file=sys.stderr)
            all_ok = False
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fdsc",
                                description="One-layer commuting-CX circuit "
                                            "synthesis for CSS codes")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("synth", help="synthesize a preparation circuit")
    ps.add_argument("--code", required=True,
                    help="ghz|toric|xcube|haah|file:PATH")
    ps.add_argument("--size", type=int, default=None)
    ps.add_argument("--strategy", required=True)
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--restarts", type=int, default=1)
    ps.add_argument("--out", default=None)
    ps.set_defaults(func=cmd_synth)

    pv = sub.add_parser("verify", help="verify a circuit against a code")
    pv.add_argument("--circuit", required=True)
    pv.add_argument("--code", required=True)
    pv.add_argument("--size", type=int, default=None)
    pv.add_argument("--oracle", action="store_true",
                    help="also run the state-vector oracle (<= 20 qubits)")
    pv.set_defaults(func=cmd_verify)

    pc = sub.add_parser("scaling", help="gate-count scaling study")
    pc.add_argument("--code", required=True)
    pc.add_argument("--strategy", required=True)
    pc.add_argument("--sizes", required=True)
    pc.add_argument("--seed", type=int, default=None)
    pc.add_argument("--verify-upto", type=int, default=0, dest="verify_upto")
    pc.add_argument("--out", default=None)
    pc.set_defaults(func=cmd_scaling)

    pg = sub.add_parser("groups", help="solvable-group multiplication networks")
    pg.add_argument("--group", required=True,
                    help="dihedral:N|abelian:a,b,...|file:PATH")
    pg.add_argument("--lengths", required=True)
    pg.add_argument("--trials", type=int, default=100)
    pg.set_defaults(func=cmd_groups)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
