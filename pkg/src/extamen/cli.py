"""Command-line front end.

Every subcommand prints a one-line summary and can write report.json plus an
optional series.csv under --out.  Those two files carry no timestamps and
re-running the same command reproduces them byte for byte; volatile data
(wall clock, output hashes, orientation and root-hair conventions) go to the
accompanying manifest.json instead.

Exit codes: 0 when the requested check passed, 1 when it ran and the
property failed (or the inputs were structurally unusable), 2 when a
resource cap or search budget was exhausted.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import approx, freegroup, walks
from .dyadic import ROOT
from .errors import CapExceeded, ExtamenError, SearchExhausted
from .graph import (
    Hair,
    Skeleton,
    ball,
    classify,
    get_orientation,
    root_hair_letter,
    set_orientation,
)
from .harmonic import canonical_phi_u, is_superharmonic_on, phi_family
from .lamplighter import orbit_enumerate, parse_config, serialize_config, switch_invariant_check
from .minfn import resolve_setfn
from .walks import WalkConfig

__all__ = ["main", "build_parser"]


def _parse_fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except ValueError:
        return Fraction(float(s))


def _resolve_vertex_fn(name: str):
    if name == "phi_u":
        return canonical_phi_u()
    if name.startswith("phi:"):
        return phi_family(int(name.split(":", 1)[1]))
    raise KeyError(f"unknown vertex function {name!r}")


def parse_set_spec(spec: str):
    """Configurations by recipe (explicit:n, single:n, sum:n, countable:n),
    from a file, or inline as comma-separated dyadics."""
    head, _, tail = spec.partition(":")
    if head == "explicit":
        return approx.explicit_En_hairs(int(tail))
    if head == "single":
        return approx.construct_En_single(canonical_phi_u(), int(tail)).E
    if head == "sum":
        phis = [phi_family(i) for i in range(3)]
        return approx.construct_En_sum(phis, int(tail)).E
    if head == "countable":
        return approx.construct_En_countable(int(tail)).E
    if head == "file":
        return parse_config(Path(tail).read_text().strip())
    return parse_config(spec)


# ---------------------------------------------------------------------------
# output plumbing


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode()


def _csv_bytes(header: Sequence[str], rows: Sequence[Sequence]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode()


def _emit(out: Optional[str], command: Sequence[str], report: dict, series, started: float) -> None:
    if out is None:
        return
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    payloads = {"report.json": _json_bytes(report)}
    if series is not None:
        header, rows = series
        payloads["series.csv"] = _csv_bytes(header, rows)
    for name, blob in payloads.items():
        (outdir / name).write_bytes(blob)
    manifest = {
        "command": list(command),
        "orientation": get_orientation(),
        "root_hair": root_hair_letter(),
        "outputs": {
            name: hashlib.sha256(blob).hexdigest() for name, blob in payloads.items()
        },
        "wall_clock_s": round(time.monotonic() - started, 3),
    }
    (outdir / "manifest.json").write_bytes(_json_bytes(manifest))


# ---------------------------------------------------------------------------
# subcommand handlers; each returns (ok, report, series)


def _cmd_graph_explore(args):
    region = ball(ROOT, args.n, cap=args.cap)
    rows = []
    skeleton = hairs = 0
    root_rays = 0
    for v in region.vertices:
        addr = classify(v)
        if isinstance(addr, Skeleton):
            skeleton += 1
            rows.append([str(v), "skeleton", len(addr.path), 0])
        else:
            hairs += 1
            if not addr.base and addr.offset == 1:
                root_rays += 1
            rows.append([str(v), "hair", len(addr.base), addr.offset])
    report = {
        "center": str(ROOT),
        "radius": args.n,
        "vertices": len(region.vertices),
        "skeleton": skeleton,
        "hairs": hairs,
        "root_hair_starts": root_rays,
        "ok": root_rays == 2,
    }
    return report["ok"], report, (["vertex", "kind", "base_depth", "offset"], rows)


def _cmd_fn_check(args):
    name = args.fn
    if name == "phi_u" or name.startswith("phi:"):
        phi = _resolve_vertex_fn(name)
        region = ball(ROOT, args.n, cap=args.cap)
        rep = is_superharmonic_on(phi, region)
        rows = [
            [str(v), str(val), str(pval), str(marg)]
            for v, val, pval, marg in rep.entries
        ]
        report = rep.to_json()
        return rep.ok, report, (["vertex", "phi", "P_phi", "margin"], rows)
    F = resolve_setfn(name)
    samples = list(orbit_enumerate((), args.n, cap=args.cap))
    ok_sw, _ = switch_invariant_check(F, samples)
    sup = walks.supermartingale_check(F, samples, mode="lamp")
    report = {
        "fn": name,
        "samples": len(samples),
        "switch_invariant": ok_sw,
        "supermartingale": sup.to_json(),
    }
    return ok_sw and sup.ok, report, None


def _cmd_approx_verify(args):
    F = resolve_setfn(args.fn)
    E = parse_set_spec(args.set)
    beta = approx.beta_schedule(args.beta).value(args.n)
    if args.weak:
        rep = approx.weak_verify(F, E, args.n, beta, samples=args.samples, seed=args.seed)
    else:
        rep = approx.strong_verify(F, E, args.n, beta, cap=args.cap)
    return rep.passed, rep.to_json(), None


def _cmd_approx_construct(args):
    beta = approx.beta_schedule(args.beta)
    if args.kind == "single":
        phi = _resolve_vertex_fn(args.fn or "phi_u")
        result = approx.construct_En_single(phi, args.n, beta=beta)
    elif args.kind == "sum":
        names = (args.fn or "phi:0,phi:1,phi:2").split(",")
        result = approx.construct_En_sum(
            [_resolve_vertex_fn(nm) for nm in names], args.n, beta=beta
        )
    elif args.kind == "markov":
        names = (args.fn or "phi:0,phi:1").split(",")
        powers = [int(p) for p in (args.powers or "1,1").split(",")]
        result = approx.construct_En_markov(
            [_resolve_vertex_fn(nm) for nm in names], powers, args.n, beta=beta
        )
    else:
        result = approx.construct_En_countable(args.n, beta=beta)
    rep = approx.strong_verify(result.setfn, result.E, args.n, result.beta, cap=args.cap)
    report = {"construction": result.to_json(), "verify": rep.to_json()}
    return rep.passed, report, None


def _cmd_approx_refute(args):
    E = parse_set_spec(args.set)
    wit = approx.golden_witness(E, args.n)
    report = {"set": serialize_config(E), "n": args.n, "witness": wit.to_json()}
    return True, report, None


def _cmd_walk_green(args):
    r = _parse_fraction(args.r)
    series = walks.lumped_return_series(args.n)
    partials = []
    total = Fraction(0)
    rk = Fraction(1)
    for k, term in enumerate(series):
        total += term * rk
        rk *= r
        partials.append([k, str(term), str(total)])
    report = {
        "n": args.n,
        "r": str(r),
        "partial": str(total),
    }
    if args.trials:
        mc = walks.green_mc(args.trials, args.steps, seed=args.seed, cap=args.cap)
        report["mc"] = mc.to_json()
    return True, report, (["n", "p_n", "partial"], partials)


def _cmd_walk_return(args):
    rep = walks.return_prob(args.n)
    monotone = all(
        rep.partials[i] <= rep.partials[i + 1] for i in range(len(rep.partials) - 1)
    )
    bounded = rep.total < Fraction(3, 4)
    rows = [
        [k, str(rep.first_return[k]), str(rep.partials[k])] for k in range(args.n + 1)
    ]
    report = rep.to_json()
    report["monotone"] = monotone
    report["below_three_quarters"] = bounded
    del report["first_return"], report["partials"]
    return monotone and bounded, report, (["n", "first_return", "partial"], rows)


def _cmd_walk_decay(args):
    checkpoints = tuple(int(c) for c in args.checkpoints.split(","))
    walk = WalkConfig(
        trials=args.trials,
        steps=args.steps,
        seed=args.seed,
        checkpoints=checkpoints,
        fn_name=args.fn or "minfun:phi_u",
    )
    rep = walks.potential_decay_experiment(walk)
    marks = sorted(rep.medians)
    decayed = rep.medians[marks[-1]] < rep.medians[marks[0]] if len(marks) > 1 else True
    report = rep.to_json()
    report["decayed"] = decayed
    return rep.ok and decayed, report, None


def _cmd_cx_scan(args):
    configs = freegroup.random_z_configs(args.trials, seed=args.seed)
    worst_len = 0
    for E in configs:
        word, ratio = freegroup.witness_word(E)
        worst_len = max(worst_len, len(word))
        if ratio > Fraction(1, 3):
            return False, {"failed_at": [str(v) for v in E]}, None
    folner = {
        L: str(freegroup.z_boundary_ratio(freegroup.tail_segment(L)))
        for L in (10, 100, 1000)
    }
    report = {
        "configs": len(configs),
        "max_witness_length": worst_len,
        "ratio_bound": "1/3",
        "folner_ratios": folner,
    }
    return worst_len <= 2, report, None


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="extamen")
    top.add_argument("--orientation", choices=("lr", "rl"), default="lr")
    sub = top.add_subparsers(dest="group", required=True)

    def common(p, *, n_default=None):
        p.add_argument("--n", type=int, default=n_default)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cap", type=int, default=10**6)
        p.add_argument("--out", default=None)

    graph = sub.add_parser("graph").add_subparsers(dest="action", required=True)
    g = graph.add_parser("explore")
    common(g, n_default=4)
    g.set_defaults(handler=_cmd_graph_explore)

    fn = sub.add_parser("fn").add_subparsers(dest="action", required=True)
    f = fn.add_parser("check")
    common(f, n_default=6)
    f.add_argument("--fn", required=True)
    f.set_defaults(handler=_cmd_fn_check)

    ap = sub.add_parser("approx").add_subparsers(dest="action", required=True)
    v = ap.add_parser("verify")
    common(v, n_default=4)
    v.add_argument("--fn", required=True)
    v.add_argument("--set", required=True)
    v.add_argument("--beta", choices=("inv_n", "inv_2n"), default="inv_n")
    v.add_argument("--weak", action="store_true")
    v.add_argument("--samples", type=int, default=500)
    v.set_defaults(handler=_cmd_approx_verify)
    c = ap.add_parser("construct")
    common(c, n_default=4)
    c.add_argument("--kind", choices=("single", "sum", "markov", "countable"), required=True)
    c.add_argument("--fn", default=None)
    c.add_argument("--powers", default=None)
    c.add_argument("--beta", choices=("inv_n", "inv_2n"), default="inv_n")
    c.set_defaults(handler=_cmd_approx_construct)
    rf = ap.add_parser("refute")
    common(rf, n_default=5)
    rf.add_argument("--set", required=True)
    rf.set_defaults(handler=_cmd_approx_refute)

    walk = sub.add_parser("walk").add_subparsers(dest="action", required=True)
    wg = walk.add_parser("green")
    common(wg, n_default=30)
    wg.add_argument("--r", default="1")
    wg.add_argument("--trials", type=int, default=0)
    wg.add_argument("--steps", type=int, default=10**5)
    wg.set_defaults(handler=_cmd_walk_green, cap_default=10**10)
    wr = walk.add_parser("return")
    common(wr, n_default=30)
    wr.set_defaults(handler=_cmd_walk_return)
    wd = walk.add_parser("decay")
    common(wd)
    wd.add_argument("--trials", type=int, default=100)
    wd.add_argument("--steps", type=int, default=1000)
    wd.add_argument("--checkpoints", default="100,1000")
    wd.add_argument("--fn", default=None)
    wd.set_defaults(handler=_cmd_walk_decay)

    cx = sub.add_parser("cx").add_subparsers(dest="action", required=True)
    s = cx.add_parser("scan")
    common(s)
    s.add_argument("--trials", type=int, default=200)
    s.set_defaults(handler=_cmd_cx_scan)
    return top


def main(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    started = time.monotonic()
    parser = build_parser()
    args = parser.parse_args(argv)
    set_orientation(args.orientation)
    # green_mc budgets exceed the generic cap; lift the default there
    if getattr(args, "cap_default", None) and args.cap == 10**6:
        args.cap = args.cap_default
    try:
        ok, report, series = args.handler(args)
    except (CapExceeded, SearchExhausted) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2
    except ExtamenError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    _emit(args.out, list(argv), report, series, started)
    status = "PASS" if ok else "FAIL"
    brief = {k: v for k, v in report.items() if not isinstance(v, (dict, list))}
    print(f"{status} {json.dumps(brief, sort_keys=True)}")
    return 0 if ok else 1
