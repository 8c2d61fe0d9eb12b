"""Command-line front end.

Subcommands bind the model builders, the DMRG/CA-MPS solvers, and the
random-circuit experiment into reproducible runs.  Every run writes four
files into its output directory: results.csv (one row per grid point or
round), trace.csv (per-sweep or per-rank detail), circuit.json (accumulated
Clifford circuits), and meta.json (the fully resolved configuration, enough
to repeat the run byte for byte).

Exit codes: 0 success, 1 runtime failure (partial traces are preserved),
2 usage or configuration error.  Floats are written with 12 significant
digits, '.' decimal point, no locale.  The NSEE_THREADS environment
variable caps the number of concurrent grid points.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .camps import (CampsConfig, camps_disentangle_state, camps_ground_state,
                    nsee)
from .clifford import CliffordCircuit
from .dmrg import DmrgConfig, ground_state
from .magic import sre_exact, sre_random_ct_average, sre_tstate
from .models import (LatticeSpec, cut_set, model_meta, toric_code,
                     transverse_ising, xxz)
from .mps import MpsState
from .randcircuit import CtExperimentConfig, run_transition_experiment

COMMANDS = ("toric", "ising", "xxz", "randct", "sre", "spectrum")


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    """12-significant-digit float field; blank for None/NaN."""
    if x is None:
        return ""
    if isinstance(x, float) and np.isnan(x):
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, str) else v
                              for v in row))
    path.write_text("\n".join(lines) + "\n")


def _point_seed(seed: int, index: int) -> int:
    """Stable per-grid-point seed derived from (seed, point index)."""
    return int(np.random.SeedSequence((seed, index)).generate_state(1)[0])


def _reduction(ee: float, ns: float):
    return (ee - ns) / ee if ee >= 1e-12 else None


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("NSEE_THREADS", "1")))
    except ValueError:
        return 1


def _write_meta(outdir: Path, command: str, config: dict, extra: dict = None):
    meta = {"command": command, "version": __version__,
            "log_base": "e", "config": config, **(extra or {})}
    (outdir / "meta.json").write_text(json.dumps(meta, indent=2,
                                                 sort_keys=True) + "\n")


def _solver_configs(args, noise_default: float = 0.0):
    dmrg = DmrgConfig(max_bond=args.max_bond,
                      truncation_threshold=args.dmrg_threshold,
                      max_sweeps=args.max_sweeps,
                      noise_amplitude=(args.noise if args.noise is not None
                                       else noise_default))
    camps = CampsConfig(dmrg=dmrg, max_camps_sweeps=args.max_camps_sweeps)
    return dmrg, camps


# -- experiments ------------------------------------------------------------

def _run_toric(args, outdir: Path):
    spec = LatticeSpec(args.lx, args.ly, "periodic", "bond")
    cuts = cut_set(spec)
    # commuting-projector model: the noise kick is required to escape the
    # product-state local minima of the two-site update
    dmrg, camps = _solver_configs(args, noise_default=1e-2)
    camps = replace(camps, dmrg=replace(dmrg, rng_seed=args.seed))
    res = camps_ground_state(toric_code(spec), cuts, camps)
    ee = nsee(res.state, cuts)
    _write_csv(outdir / "results.csv",
               ["energy", "ee_sum", "max_cut_ee", "sweeps", "converged"],
               [(res.energy, ee, max(res.per_sweep_trace[-1][3], 0.0),
                 res.sweeps, int(res.converged))])
    _write_csv(outdir / "trace.csv",
               ["sweep", "energy", "ee_sum", "max_cut_ee", "gates"],
               res.per_sweep_trace)
    (outdir / "circuit.json").write_text(res.circuit.to_json() + "\n")
    _write_meta(outdir, "toric", {**vars(args)},
                model_meta("toric_code", spec, {}) | {"n_cuts": len(cuts)})
    return 0


def _sweep(points, worker):
    """Run grid points (optionally concurrently); row order stays the grid
    order, and a failing point yields an in-row error instead of aborting."""
    def safe(item):
        idx, value = item
        try:
            return worker(idx, value) + ("",)
        except Exception as exc:  # noqa: BLE001 - recorded in-row
            return (value,) + (None,) * 5 + (f"{type(exc).__name__}: {exc}",)

    items = list(enumerate(points))
    n = _threads()
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(safe, items))
    return [safe(it) for it in items]


def _lattice_sweep(args, outdir: Path, name: str, param_name: str,
                   grid, hamiltonian_for):
    if not grid:
        raise UsageError("empty parameter grid")
    spec = LatticeSpec(args.lx, args.ly)
    cuts = cut_set(spec)
    dmrg, camps = _solver_configs(args)
    traces, circuits = {}, {}

    def worker(idx, value):
        h = hamiltonian_for(spec, value)
        cfg = replace(dmrg, rng_seed=_point_seed(args.seed, idx))
        dm = ground_state(h, cfg)
        ee = nsee(dm.state, cuts)
        ccfg = replace(camps, dmrg=cfg)
        gs = camps_ground_state(h, cuts, ccfg, initial=dm.state.clone())
        dis = camps_disentangle_state(
            dm.state, cuts, replace(ccfg, selection_mode="min_entropy"))
        ns = nsee(dis, cuts)
        traces[value] = dis.per_sweep_trace
        circuits[value] = json.loads(dis.circuit.to_json())
        return (value, dm.energy, ee, ns, _reduction(ee, ns), gs.energy)

    rows = _sweep(grid, worker)
    _write_csv(outdir / "results.csv",
               [param_name, "energy", "ee_sum", "nsee_sum", "reduction_rate",
                "camps_energy", "error"], rows)
    trace_rows = [(v, *t) for v in grid for t in traces.get(v, [])]
    _write_csv(outdir / "trace.csv",
               [param_name, "sweep", "energy", "ee_sum", "max_cut_ee",
                "gates"], trace_rows)
    (outdir / "circuit.json").write_text(json.dumps(
        {_fmt(v): circuits.get(v, []) for v in grid}, indent=2) + "\n")
    _write_meta(outdir, name, {**vars(args)},
                model_meta(name, spec, {param_name: list(grid)})
                | {"n_cuts": len(cuts)})
    return 1 if any(r[-1] for r in rows) else 0


def _grid(lo: float, hi: float, step: float):
    if step <= 0 or hi < lo:
        raise UsageError("bad parameter grid")
    out = []
    v = lo
    while v <= hi + 1e-9:
        out.append(round(v, 10))
        v += step
    return out


def _run_ising(args, outdir: Path):
    grid = _grid(args.h_min, args.h_max, args.h_step)
    return _lattice_sweep(
        args, outdir, "ising", "h", grid,
        lambda spec, h: transverse_ising(spec, args.j, h, args.hz))


def _run_xxz(args, outdir: Path):
    grid = _grid(args.delta_min, args.delta_max, args.delta_step)
    return _lattice_sweep(
        args, outdir, "xxz", "delta", grid,
        lambda spec, d: xxz(spec, args.j, d, args.hstag))


def _ct_config(args) -> CtExperimentConfig:
    return CtExperimentConfig(
        n_qubits=args.n, rounds_max=args.rounds,
        layers_per_round=args.layers, t_gates_per_round=args.t_per_round,
        truncation_threshold=args.threshold,
        runs_to_average=args.runs, rng_seed=args.seed)


def _spectrum_rows(records):
    return [(r.round, rank, val)
            for r in records for rank, val in enumerate(r.spectrum)]


def _run_randct(args, outdir: Path):
    records = run_transition_experiment(_ct_config(args))
    _write_csv(outdir / "results.csv",
               ["round", "nsee_mean", "nsee_stderr", "overlap_mean",
                "m2_mean", "m2_formula"],
               [(r.round, r.nsee, r.nsee_stderr, r.overlap_f, r.m2_density,
                 r.m2_formula) for r in records])
    _write_csv(outdir / "trace.csv", ["round", "rank", "value"],
               _spectrum_rows(records))
    (outdir / "circuit.json").write_text("[]\n")
    _write_meta(outdir, "randct", {**vars(args)})
    return 0


def _run_spectrum(args, outdir: Path):
    args.runs = 1
    records = run_transition_experiment(_ct_config(args))
    _write_csv(outdir / "results.csv", ["round", "rank", "value"],
               _spectrum_rows(records))
    _write_csv(outdir / "trace.csv",
               ["round", "nsee", "overlap"],
               [(r.round, r.nsee, r.overlap_f) for r in records])
    (outdir / "circuit.json").write_text("[]\n")
    _write_meta(outdir, "spectrum", {**vars(args)})
    return 0


def _run_sre(args, outdir: Path):
    n = args.n
    if args.state == "tstate":
        plus = np.array([1.0, np.exp(1j * np.pi / 4)]) / np.sqrt(2)
        vec = plus
        for _ in range(n - 1):
            vec = np.kron(vec, plus)
        value = sre_exact(vec, args.order).value
        reference = sre_tstate(n) if args.order == 2 else None
    elif args.state == "zero":
        value = sre_exact(MpsState.product_state([0] * n), args.order).value
        reference = 0.0
    else:  # haar-random pure state
        rng = np.random.default_rng(args.seed)
        vec = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        value = sre_exact(vec / np.linalg.norm(vec), args.order).value
        reference = None
    _write_csv(outdir / "results.csv",
               ["n_qubits", "order", "value_nats", "density", "reference"],
               [(n, args.order, value, value / n, reference)])
    _write_csv(outdir / "trace.csv",
               ["rounds", "ensemble_m2"],
               [(r, sre_random_ct_average(n, r)) for r in range(5)])
    (outdir / "circuit.json").write_text("[]\n")
    _write_meta(outdir, "sre", {**vars(args)})
    return 0


# -- argument parsing -------------------------------------------------------

def _add_solver_flags(p):
    p.add_argument("--max-bond", type=int, default=64)
    p.add_argument("--dmrg-threshold", type=float, default=1e-10)
    p.add_argument("--max-sweeps", type=int, default=30)
    p.add_argument("--max-camps-sweeps", type=int, default=50)
    p.add_argument("--noise", type=float, default=None,
                   help="DMRG noise amplitude (default per model)")


def _add_ct_flags(p):
    p.add_argument("--n", type=int, default=14)
    p.add_argument("--rounds", type=int, default=12)
    p.add_argument("--layers", type=int, default=20)
    p.add_argument("--t-per-round", type=int, default=2)
    p.add_argument("--threshold", type=float, default=5e-3)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsee",
        description="Non-stabilizerness entanglement entropy experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=str, default=None,
                       help="flat JSON config; flags override its keys")
        p.add_argument("--output-dir", type=str, default=".")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("toric", help="toric-code CA-MPS ground state")
    p.add_argument("--lx", type=int, default=2)
    p.add_argument("--ly", type=int, default=4)
    _add_solver_flags(p)
    common(p)

    p = sub.add_parser("ising", help="transverse-Ising NsEE sweep")
    p.add_argument("--lx", type=int, default=4)
    p.add_argument("--ly", type=int, default=4)
    p.add_argument("--j", type=float, default=1.0)
    p.add_argument("--h-min", type=float, default=0.0)
    p.add_argument("--h-max", type=float, default=5.0)
    p.add_argument("--h-step", type=float, default=0.25)
    p.add_argument("--hz", type=float, default=0.0,
                   help="longitudinal pinning field")
    _add_solver_flags(p)
    common(p)

    p = sub.add_parser("xxz", help="XXZ NsEE sweep")
    p.add_argument("--lx", type=int, default=4)
    p.add_argument("--ly", type=int, default=4)
    p.add_argument("--j", type=float, default=1.0)
    p.add_argument("--delta-min", type=float, default=0.2)
    p.add_argument("--delta-max", type=float, default=2.0)
    p.add_argument("--delta-step", type=float, default=0.2)
    p.add_argument("--hstag", type=float, default=0.0,
                   help="staggered pinning field")
    _add_solver_flags(p)
    common(p)

    p = sub.add_parser("randct", help="random Clifford+T transition")
    _add_ct_flags(p)
    p.add_argument("--runs", type=int, default=10)
    common(p)

    p = sub.add_parser("spectrum", help="single-run middle-cut spectra")
    _add_ct_flags(p)
    common(p)

    p = sub.add_parser("sre", help="exact stabilizer Renyi entropy")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--state", choices=("tstate", "zero", "random"),
                   default="tstate")
    common(p)

    return parser


def _apply_config_file(args: argparse.Namespace, parser, argv):
    """Merge a flat JSON config under explicit command-line flags."""
    with open(args.config) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a flat JSON object")
    known = set(vars(args)) - {"command", "config"}
    unknown = [k for k in data if k not in known]
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if any(isinstance(v, (dict, list)) for v in data.values()):
        raise UsageError("config values must be scalars (flat document)")
    explicit = {a.dest for a in parser._actions
                if any(s in argv for s in a.option_strings)}
    for key, value in data.items():
        if key not in explicit:
            setattr(args, key, value)


RUNNERS = {"toric": _run_toric, "ising": _run_ising, "xxz": _run_xxz,
           "randct": _run_randct, "sre": _run_sre, "spectrum": _run_spectrum}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.config:
            # find the subparser that produced args.command
            subparser = next(
                a.choices[args.command] for a in parser._actions
                if isinstance(a, argparse._SubParsersAction))
            _apply_config_file(args, subparser, argv)
        outdir = Path(args.output_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        return RUNNERS[args.command](args, outdir)
    except (UsageError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failure record
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        try:
            outdir = Path(args.output_dir)
            outdir.mkdir(parents=True, exist_ok=True)
            (outdir / "error.json").write_text(json.dumps(record) + "\n")
        except OSError:
            pass
        return 1


if __name__ == "__main__":
    sys.exit(main())
