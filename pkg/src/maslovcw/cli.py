"""Command-line front end.

JSON reports go to stdout, human diagnostics to stderr.  Exit codes: 0 on
success, 1 on input or usage errors, 2 when an identity check fails.  Every
report embeds the fully resolved run configuration, and runs with the same
seed and thread count are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import verify as verify_mod
from .connections import build_collar_connection, builtin_connection
from .curvature import chern_weil_index, double_degree, edge_transports
from .errors import InconsistentFormulas, MaslovCWError, ViolatedIdentity
from .loops import (
    BundlePairSpec,
    FrameLoop,
    generate_loop,
    load_loop,
    maslov_bundle_pair,
    maslov_loop,
    winding_increments,
)
from .mesh import Mesh2D
from .orbifold import load_orbifold, mu_cw_orbifold, mu_pi, desing_index, chen_ruan_correction, BranchCover
from .polygon import TransversalBundleData, fredholm_index, mu_cw_polygon, mu_top

MESH_MIN, MESH_MAX = 16, 1024


@dataclass
class RunConfig:
    command: str
    inputs: list
    mesh: int
    substeps: int
    collar: float
    cutoff: str
    quantum: str
    format: str
    plot: Optional[str]
    seed: int
    threads: int


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _frac(text: str) -> Fraction:
    return Fraction(text)


def _build_parser() -> _Parser:
    p = _Parser(prog="maslovcw", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--mesh", type=int, default=128, help="radial/angular resolution")
        sp.add_argument("--substeps", type=int, default=1)
        sp.add_argument("--collar", type=float, default=0.3, help="collar width")
        sp.add_argument("--cutoff", default="cubic", choices=["cubic", "quintic"])
        sp.add_argument("--quantum", type=_frac, default=None, help="rounding quantum p/q")
        sp.add_argument("--format", default="json", choices=["json", "csv"])
        sp.add_argument("--plot", default=None, help="write det^2 phase curve SVG here")
        sp.add_argument("--seed", type=int, default=7)
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("maslov", help="winding Maslov index of a frame loop")
    sp.add_argument("--input", action="append", default=[], help="FrameLoop JSON file")
    sp.add_argument("--generator", default=None)
    sp.add_argument("--k", type=int, default=1, help="power_k generator parameter")
    sp.add_argument("--rank", type=int, default=1, help="constant generator rank")
    sp.add_argument("--samples", type=int, default=256)
    common(sp)

    sp = sub.add_parser("cw", help="Chern-Weil curvature index")
    sp.add_argument("--input", action="append", default=[], help="loop JSON (collar connection)")
    sp.add_argument("--builtin", default=None, help="named analytic connection")
    sp.add_argument("--faces-csv", default=None, help="write per-face angles CSV here")
    common(sp)

    sp = sub.add_parser("double", help="doubled-bundle degree versus summed winding")
    sp.add_argument("--input", action="append", default=[], help="loop JSON per component")
    sp.add_argument("--generator", default=None)
    sp.add_argument("--samples", type=int, default=256)
    common(sp)

    sp = sub.add_parser("polygon", help="transversal boundary data indices")
    sp.add_argument("--input", required=True, help="polygon JSON file")
    sp.add_argument("--verify", action="store_true", help="also integrate curvature")
    common(sp)

    sp = sub.add_parser("orbifold", help="orbifold disc indices and identities")
    sp.add_argument("--input", required=True, help="orbifold JSON file")
    common(sp)

    sp = sub.add_parser("verify", help="run the verification suites")
    sp.add_argument("--suite", default="all", help="suite name or 'all'")
    common(sp)

    sp = sub.add_parser("convergence", help="mesh-refinement study on the disc example")
    sp.add_argument("--resolutions", default="32,64,128")
    common(sp)
    return p


def _config(args, inputs) -> RunConfig:
    if not (MESH_MIN <= args.mesh <= MESH_MAX):
        raise MaslovCWError(f"--mesh must lie in [{MESH_MIN}, {MESH_MAX}]")
    if args.substeps < 1:
        raise MaslovCWError("--substeps must be >= 1")
    q = args.quantum
    return RunConfig(
        command=args.command,
        inputs=list(inputs),
        mesh=args.mesh,
        substeps=args.substeps,
        collar=args.collar,
        cutoff=args.cutoff,
        quantum="default" if q is None else f"{q.numerator}/{q.denominator}",
        format=args.format,
        plot=args.plot,
        seed=args.seed,
        threads=args.threads,
    )


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, sort_keys=True))
        return
    # csv: flattened key,value rows in sorted key order
    def flatten(prefix, obj, rows):
        if isinstance(obj, dict):
            for k in sorted(obj):
                flatten(f"{prefix}{k}." if prefix == "" else f"{prefix}{k}.", obj[k], rows)
        elif isinstance(obj, (list, tuple)):
            for i, v in enumerate(obj):
                flatten(f"{prefix}{i}.", v, rows)
        else:
            rows.append((prefix.rstrip("."), obj))

    rows = []
    flatten("", report, rows)
    for key, val in rows:
        print(f"{key},{val}")


def _phase_svg(loop: FrameLoop, path: str) -> None:
    """Unwrapped phase of det^2 against t, as a bare SVG polyline."""
    incs = winding_increments(loop.det_b())
    phase = np.concatenate([[0.0], np.cumsum(incs)])
    t = np.arange(len(phase)) / (len(phase) - 1)
    W, H, pad = 800, 400, 40
    lo, hi = float(phase.min()), float(phase.max())
    span = max(hi - lo, 1e-9)
    xs = pad + t * (W - 2 * pad)
    ys = H - pad - (phase - lo) / span * (H - 2 * pad)
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">'
            f'<rect width="{W}" height="{H}" fill="white"/>'
            f'<line x1="{pad}" y1="{H-pad}" x2="{W-pad}" y2="{H-pad}" stroke="black"/>'
            f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{H-pad}" stroke="black"/>'
            f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>'
            f'<text x="{W//2}" y="{H-10}" font-size="12">t</text>'
            f'<text x="8" y="{H//2}" font-size="12">arg det B</text>'
            "</svg>"
        )


def _loops_from_args(args) -> list:
    loops = [load_loop(p) for p in args.input]
    if getattr(args, "generator", None):
        params = {}
        if args.generator == "power_k":
            params["k"] = args.k
        if args.generator == "constant":
            params["n"] = args.rank
        loops.append(generate_loop(args.generator, N=args.samples, **params))
    if not loops:
        raise MaslovCWError("no input loop: pass --input or --generator")
    return loops


def _cmd_maslov(args) -> dict:
    loops = _loops_from_args(args)
    cfg = _config(args, args.input + ([args.generator] if args.generator else []))
    if len(loops) == 1:
        index = maslov_loop(loops[0])
    else:
        pair = BundlePairSpec(loops[0].n, tuple(loops))
        index = maslov_bundle_pair(pair)
    if args.plot:
        _phase_svg(loops[0], args.plot)
    return {"index": index, "components": len(loops), "config": asdict(cfg)}


def _cmd_cw(args) -> dict:
    cfg = _config(args, args.input + ([args.builtin] if args.builtin else []))
    quantum = args.quantum if args.quantum is not None else Fraction(1)
    if args.builtin:
        spec = builtin_connection(args.builtin)
        loop = None
        mesh = Mesh2D("disc", args.mesh, args.mesh)
    else:
        loops = _loops_from_args(args)
        loop = loops[0]
        spec = build_collar_connection(loop, width=args.collar, cutoff=args.cutoff)
        mesh = Mesh2D("disc", max(MESH_MIN, args.mesh // 4), len(loop))
    D = edge_transports(spec, mesh, args.substeps)
    rep = chern_weil_index(D, quantum, loop=loop)
    if args.faces_csv:
        rep.faces_csv(args.faces_csv)
    if args.plot and loop is not None:
        _phase_svg(loop, args.plot)
    out = rep.to_json_dict()
    # integral quanta print as plain ints, matching the simple-report shape
    if rep.rounded.denominator == 1:
        out["rounded"] = rep.rounded.numerator
    out["config"] = asdict(cfg)
    return out


def _cmd_double(args) -> dict:
    loops = _loops_from_args(args)
    cfg = _config(args, args.input + ([args.generator] if args.generator else []))
    pair = BundlePairSpec(loops[0].n, tuple(loops))
    deg = double_degree(pair)
    mu = maslov_bundle_pair(pair)
    if deg != mu:
        raise ViolatedIdentity(f"doubled degree {deg} != index {mu}")
    return {"degree": deg, "index": mu, "equal": True, "config": asdict(cfg)}


def _cmd_polygon(args) -> dict:
    cfg = _config(args, [args.input])
    with open(args.input, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    n = int(obj["n"])
    chi = int(obj.get("chi", 1))
    edges = []
    for e in obj["edges"]:
        rows = e["samples"] if isinstance(e, dict) else e
        M = len(rows)
        arr = np.empty((M, n, n), dtype=complex)
        for k, row in enumerate(rows):
            arr[k] = np.array([complex(re, im) for re, im in row]).reshape(n, n)
        edges.append(arr)
    data = TransversalBundleData(n, edges, chi)
    top = mu_top(data)
    value, details = mu_cw_polygon(data, verify=args.verify)
    ind = fredholm_index(data)
    report = {
        "mu_top": top,
        "mu_cw": {"num": value.numerator, "den": value.denominator},
        "ind": ind,
        "k_plus_1": data.k_plus_1,
        "n": n,
        "chi": chi,
        "config": asdict(cfg),
    }
    if args.verify:
        report["verification"] = {"raw": details["raw"], "residual": details["residual"]}
    return report


def _cmd_orbifold(args) -> dict:
    cfg = _config(args, [args.input])
    spec = load_orbifold(args.input)
    pi_m = mu_pi(spec)
    pi_2m = mu_pi(spec, BranchCover(2 * spec.cone.order, spec.cone.order))
    rounded, rep = mu_cw_orbifold(spec)
    de = desing_index(spec)
    corr = chen_ruan_correction([spec.cone])
    identity = rounded == Fraction(de) + 2 * corr == pi_m
    report = {
        "mu_pi": {"num": pi_m.numerator, "den": pi_m.denominator},
        "mu_cw": {
            "raw": rep.raw,
            "rounded": {"num": rounded.numerator, "den": rounded.denominator},
        },
        "mu_de": de,
        "correction": {"num": corr.numerator, "den": corr.denominator},
        "identities": {
            "cover_independence": pi_m == pi_2m,
            "desingularization": identity,
        },
        "config": asdict(cfg),
    }
    if not (identity and pi_m == pi_2m):
        raise ViolatedIdentity("orbifold identity failed", report)
    return report


def _cmd_verify(args) -> dict:
    cfg = _config(args, [])
    names = list(verify_mod.SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in verify_mod.SUITES:
            raise MaslovCWError(f"unknown suite {name!r}; choose from {sorted(verify_mod.SUITES)}")
    report = verify_mod.run_suites(names, args.seed)
    report["config"] = asdict(cfg)
    for s in report["suites"]:
        status = "PASS" if s["ok"] else "FAIL"
        print(f"{s['suite']:32s} {status} ({s['passed']}/{s['cases']})", file=sys.stderr)
    return report


def _cmd_convergence(args) -> dict:
    cfg = _config(args, [])
    res = tuple(int(x) for x in args.resolutions.split(","))
    report = verify_mod.suite_convergence(res)
    report["config"] = asdict(cfg)
    return report


_COMMANDS = {
    "maslov": _cmd_maslov,
    "cw": _cmd_cw,
    "double": _cmd_double,
    "polygon": _cmd_polygon,
    "orbifold": _cmd_orbifold,
    "verify": _cmd_verify,
    "convergence": _cmd_convergence,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        report = _COMMANDS[args.command](args)
    except (ViolatedIdentity, InconsistentFormulas) as exc:
        print(f"identity violation: {exc}", file=sys.stderr)
        return 2
    except (MaslovCWError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(report, args.format)
    if args.command == "verify" and not report["ok"]:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
