"""Command-line interface.

Commands: static, floquet, trace, scan, verify.  Inputs are either a
builtin dimer model or a JSON file (complex numbers as [re, im] pairs,
matrices row-major, schedules as an ordered event list).  Outputs are
deterministic CSV/JSON plus optional gnuplot scripts.

Exit codes: 0 success, 1 config error, 2 numerical failure,
3 verify-suite failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from . import floquet as fl
from . import liouville as lv
from . import models as md
from . import selfcheck
from .linalg import (
    DEFAULT_TOL_EIG,
    DEFAULT_TOL_RANK,
    NumericalError,
    as_matrix,
    eig,
    rank,
)


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# serialization helpers


def _r(x) -> str:
    """Shortest exact decimal representation of a float."""
    return repr(float(x))


def _f(x: float) -> float:
    # floats pass through json.dumps with repr, which round-trips exactly
    return float(x)


def _c(z: complex) -> list[float]:
    return [_f(np.real(z)), _f(np.imag(z))]


def _mat(m: np.ndarray) -> list:
    return [[_c(z) for z in row] for row in np.asarray(m, dtype=complex)]


def _parse_complex(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return complex(float(obj[0]), float(obj[1]))
    raise ConfigError(f"cannot parse complex entry {obj!r}; use a number or [re, im]")


def parse_matrix(obj) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ConfigError("matrix must be a non-empty list of rows")
    rows = [[_parse_complex(z) for z in row] for row in obj]
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ConfigError("matrix rows have inconsistent lengths")
    m = np.array(rows, dtype=complex)
    if m.shape[0] != m.shape[1]:
        raise ConfigError(f"matrix must be square, got shape {m.shape}")
    return as_matrix(m)


def parse_schedule(obj) -> fl.Schedule:
    try:
        dim = int(obj["dim"])
        raw_events = obj["events"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"schedule JSON needs 'dim' and 'events': {exc}") from exc
    events = []
    for i, ev in enumerate(raw_events):
        if "segment" in ev:
            seg = ev["segment"]
            if "duration" not in seg or "h" not in seg:
                raise ConfigError(f"event {i}: segment needs 'duration' and 'h'")
            events.append(fl.Segment(float(seg["duration"]), parse_matrix(seg["h"])))
        elif "kick" in ev:
            if "k" not in ev["kick"]:
                raise ConfigError(f"event {i}: kick needs 'k'")
            events.append(fl.Kick(parse_matrix(ev["kick"]["k"])))
        else:
            raise ConfigError(f"event {i}: expected 'segment' or 'kick'")
    try:
        return fl.Schedule(dim=dim, events=events)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def parse_psi0(text: str) -> np.ndarray:
    try:
        entries = [
            complex(*(float(p) for p in part.split(",")))
            for part in text.split(";")
        ]
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"cannot parse psi0 {text!r}; use 're,im;re,im;...'") from exc
    return np.array(entries, dtype=complex)


def parse_grid(text: str):
    try:
        gpart, tpart = text.split(",")
        glo, ghi, gn = gpart.split(":")
        tlo, thi, tn = tpart.split(":")
        gammas = np.linspace(float(glo), float(ghi), int(gn))
        jts = np.linspace(float(tlo), float(thi), int(tn))
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {text!r}; use 'gmin:gmax:n,tmin:tmax:n'") from exc
    if gammas.size < 2 or jts.size < 2:
        raise ConfigError("grid needs at least 2 points per axis")
    return gammas, jts


# ---------------------------------------------------------------------------
# config resolution


def _model_from_args(args) -> md.Model:
    names = {m.value: m for m in md.Model}
    if args.model not in names:
        raise ConfigError(
            f"unknown model {args.model!r}; available: {', '.join(sorted(names))}"
        )
    return names[args.model]


def _waveform_from_args(args, default: md.Waveform) -> md.Waveform:
    if args.waveform is None:
        return default
    names = {w.value: w for w in md.Waveform}
    if args.waveform not in names:
        raise ConfigError(f"unknown waveform {args.waveform!r}")
    return names[args.waveform]


def _default_waveform(model: md.Model, periodic: bool) -> md.Waveform:
    if not periodic:
        return md.Waveform.STATIC
    return md.Waveform.SQUARE_WAVE if model is md.Model.QUANTUM else md.Waveform.DELTA_KICKS


def _params_from_args(args, waveform: md.Waveform) -> md.DimerParams:
    if args.JT is None:
        raise ConfigError("missing --JT (period in units of 1/J)")
    try:
        return md.DimerParams(
            J=args.J, gamma=args.gamma * args.J, T=args.JT / args.J, waveform=waveform
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def resolve_schedule(args, periodic: bool) -> fl.Schedule:
    """Schedule from --model or --input; exactly one source required."""
    if (args.model is None) == (args.input is None):
        raise ConfigError("provide exactly one of --model or --input")
    if args.input is not None:
        obj = _load_json(args.input)
        if "matrix" in obj:
            h = parse_matrix(obj["matrix"])
            period = args.JT if args.JT is not None else 1.0
            return fl.Schedule(dim=h.shape[0], events=[fl.Segment(period, h)])
        return parse_schedule(obj)
    model = _model_from_args(args)
    waveform = _waveform_from_args(args, _default_waveform(model, periodic))
    if periodic and waveform is md.Waveform.STATIC:
        pass  # a static schedule is still a valid (one-segment) period
    return md.build_schedule(model, _params_from_args(args, waveform))


def resolve_static_hamiltonian(args) -> np.ndarray:
    sched = resolve_schedule(args, periodic=False)
    segs = [ev for ev in sched.events if isinstance(ev, fl.Segment)]
    if len(segs) != 1 or len(sched.events) != 1:
        raise ConfigError("static mode needs a single-segment schedule or a raw matrix")
    return segs[0].generator


def _load_json(path: str):
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read input file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _formats(args) -> set[str]:
    fmts = {f.strip() for f in args.format.split(",") if f.strip()}
    unknown = fmts - {"csv", "json", "gnuplot"}
    if unknown:
        raise ConfigError(f"unknown output formats: {', '.join(sorted(unknown))}")
    return fmts


def _eigenop_record(eop: lv.EigenOperator, label: str, tol_rank: float) -> dict:
    return {
        "label": label,
        "rate": _c(eop.rate),
        "hermitian": bool(eop.hermitian),
        "rank": int(rank(eop.op, tol_rank)),
        "residual": _f(eop.residual),
        "matrix": _mat(eop.op),
    }


# ---------------------------------------------------------------------------
# commands


def run_static(args) -> int:
    h = resolve_static_hamiltonian(args)
    out = _outdir(args)
    fmts = _formats(args)
    result = lv.eigen_operators(h, tol_eig=args.tol_eig, tol_rank=args.tol_rank)
    phase = lv.classify_pt_phase(h, args.tol_eig)
    ops = result.conserved + result.transient
    report = {
        "mode": "static",
        "dim": int(h.shape[0]),
        "hamiltonian": _mat(h),
        "hamiltonian_eigenvalues": [_c(z) for z in result.hamiltonian_spectrum.eigenvalues],
        "pt_phase": phase.value,
        "conserved_count": len(result.conserved),
        "operators": [
            _eigenop_record(e, f"eta{i + 1}", args.tol_rank) for i, e in enumerate(ops)
        ],
    }
    if "json" in fmts:
        _write_json(out / "static_report.json", report)
    if "csv" in fmts:
        computed = np.sort_complex(eig(result.liouvillian, args.tol_eig).eigenvalues)
        predicted = np.sort_complex(lv.predicted_rates(h, args.tol_eig))
        lines = ["index,re_computed,im_computed,re_predicted,im_predicted"]
        for i, (c, p) in enumerate(zip(computed, predicted)):
            lines.append(f"{i},{_r(c.real)},{_r(c.imag)},{_r(p.real)},{_r(p.imag)}")
        (out / "liouvillian_spectrum.csv").write_text("\n".join(lines) + "\n")
    print(f"static: N={h.shape[0]}, phase={phase.value}, "
          f"{len(result.conserved)} conserved / {len(result.transient)} transient")
    return 0


def _floquet_report(sched: fl.Schedule, args) -> tuple[dict, fl.FloquetPropagator, list]:
    fp = fl.propagator(sched, args.tol_eig)
    ops = fl.floquet_eigen_operators(fp.gf, args.tol_eig, args.tol_rank)
    recursion = None
    conserved = [e for e in ops if abs(e.rate - 1.0) <= 1e-8]
    if conserved:
        rec = fl.recursive_floquet(conserved[0].op, fp.gf)
        recursion = {
            "seed": "eta1",
            "symmetrized_independent": rec.symmetrized_independent,
            "antisymmetrized_independent": rec.antisymmetrized_independent,
        }
    report = {
        "mode": "floquet",
        "dim": sched.dim,
        "period": _f(sched.period),
        "propagator": _mat(fp.gf),
        "kappa": [_c(z) for z in fp.kappa.eigenvalues],
        "phase": fp.phase.value,
        "operators": [
            _eigenop_record(e, f"eta{i + 1}", args.tol_rank) for i, e in enumerate(ops)
        ],
        "recursive_check": recursion,
    }
    return report, fp, ops


def run_floquet(args) -> int:
    sched = resolve_schedule(args, periodic=True)
    out = _outdir(args)
    fmts = _formats(args)
    report, fp, ops = _floquet_report(sched, args)
    if "json" in fmts:
        _write_json(out / "floquet_report.json", report)
    if "csv" in fmts:
        lines = ["label,re_lambda,im_lambda,hermitian,residual"]
        for i, e in enumerate(ops):
            lines.append(
                f"eta{i + 1},{_r(e.rate.real)},{_r(e.rate.imag)},{int(e.hermitian)},{_r(e.residual)}"
            )
        (out / "floquet_multipliers.csv").write_text("\n".join(lines) + "\n")
    print(f"floquet: N={sched.dim}, phase={fp.phase.value}, "
          f"multipliers={[f'{z.rate:.4g}' for z in ops]}")
    return 0


def run_trace(args) -> int:
    sched = resolve_schedule(args, periodic=True)
    out = _outdir(args)
    fmts = _formats(args)
    psi0 = parse_psi0(args.psi0) if args.psi0 else _default_psi0(sched.dim)
    if psi0.size != sched.dim:
        raise ConfigError(f"psi0 has {psi0.size} entries, expected {sched.dim}")
    _, fp, ops = _floquet_report(sched, args)
    series = fl.evolve_trace(
        sched,
        psi0,
        [e.op for e in ops],
        steps_per_period=args.steps_per_period,
        periods=args.periods,
        labels=[f"eta{i + 1}" for i in range(len(ops))],
        rates=[e.rate for e in ops],
    )
    strobe = set(int(i) for i in series.stroboscopic_indices)
    if "csv" in fmts:
        lines = [
            "t_over_T,operator_label,re_value,im_value,is_stroboscopic,"
            "re_lambda_pow_t,im_lambda_pow_t,normalized"
        ]
        for a, label in enumerate(series.labels):
            lam = series.rates[a]
            loglam = np.log(lam)
            for i, t in enumerate(series.times):
                v = series.values[a, i]
                ref = np.exp(loglam * t)
                lines.append(
                    f"{_r(t)},{label},{_r(v.real)},{_r(v.imag)},{int(i in strobe)},"
                    f"{_r(ref.real)},{_r(ref.imag)},{int(series.normalized[a])}"
                )
        (out / "trace.csv").write_text("\n".join(lines) + "\n")
    if "json" in fmts:
        _write_json(
            out / "trace_report.json",
            {
                "mode": "trace",
                "psi0": [_c(z) for z in psi0],
                "labels": series.labels,
                "multipliers": [_c(z) for z in series.rates],
                "normalized": series.normalized,
                "periods": args.periods,
                "steps_per_period": args.steps_per_period,
            },
        )
    if "gnuplot" in fmts:
        _write_gnuplot(out, series)
    print(f"trace: {len(series.labels)} operators, "
          f"{series.times.size} samples over {args.periods} periods")
    return 0


def _default_psi0(dim: int) -> np.ndarray:
    return np.ones(dim, dtype=complex) / np.sqrt(dim)


def _write_gnuplot(out: Path, series: fl.TraceSeries) -> None:
    # one datafile per operator keeps the plot script trivial
    for a, label in enumerate(series.labels):
        lam = series.rates[a]
        loglam = np.log(lam)
        lines = ["# t_over_T re_value im_value re_ref"]
        for i, t in enumerate(series.times):
            v = series.values[a, i]
            ref = np.exp(loglam * t)
            lines.append(f"{_r(t)} {_r(v.real)} {_r(v.imag)} {_r(ref.real)}")
        (out / f"trace_{label}.dat").write_text("\n".join(lines) + "\n")
    n = len(series.labels)
    script = [
        "set terminal pngcairo size 1200,900",
        "set output 'trace.png'",
        f"set multiplot layout {(n + 1) // 2},2",
        "set xlabel 't/T'",
    ]
    for label in series.labels:
        script.append(
            f"plot 'trace_{label}.dat' using 1:2 with lines title '{label}', "
            f"'trace_{label}.dat' using 1:4 with dots title 'Re lambda^t'"
        )
    script.append("unset multiplot")
    (out / "trace.gp").write_text("\n".join(script) + "\n")


def _scan_point(model: md.Model, waveform: md.Waveform, gj: float, jt: float, args):
    p = md.DimerParams(J=args.J, gamma=gj * args.J, T=jt / args.J, waveform=waveform)
    if waveform is md.Waveform.STATIC:
        h = (
            md.quantum_hamiltonian(p.J, p.gamma)
            if model is md.Model.QUANTUM
            else md.classical_hamiltonian(p.J, p.gamma)
        )
        phase = lv.classify_pt_phase(h, args.tol_eig)
        w = np.linalg.eigvals(h)
        measure = float(np.max(np.abs(w.imag)))
        return phase.value, measure
    fp = fl.propagator(md.build_schedule(model, p), args.tol_eig)
    moduli = np.abs(fp.kappa.eigenvalues)
    return fp.phase.value, float(np.max(moduli) / max(np.min(moduli), 1e-300))


def run_scan(args) -> int:
    if args.model is None:
        raise ConfigError("scan mode requires --model")
    model = _model_from_args(args)
    waveform = _waveform_from_args(args, _default_waveform(model, periodic=True))
    gammas, jts = parse_grid(args.grid)
    out = _outdir(args)
    fmts = _formats(args)

    points = [(gj, jt) for jt in jts for gj in gammas]
    workers = int(os.environ.get("INTERTWINE_THREADS", os.cpu_count() or 1))
    failures = []

    def evaluate(pt):
        gj, jt = pt
        try:
            return _scan_point(model, waveform, gj, jt, args)
        except Exception as exc:  # per-point failures are recorded, not fatal
            return ("error", str(exc))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, points))
    else:
        results = [evaluate(pt) for pt in points]

    lines = ["gamma_over_j,jt,phase,kappa_ratio"]
    for (gj, jt), (phase, measure) in zip(points, results):
        if phase == "error":
            failures.append({"gamma_over_j": _f(gj), "jt": _f(jt), "error": measure})
            lines.append(f"{_r(gj)},{_r(jt)},error,nan")
        else:
            lines.append(f"{_r(gj)},{_r(jt)},{phase},{_r(measure)}")
    if "csv" in fmts:
        (out / "scan_grid.csv").write_text("\n".join(lines) + "\n")

    contour = _refine_contour(model, waveform, gammas, jts, args)
    if "csv" in fmts:
        clines = ["gamma_over_j,jt,analytic_gamma_over_j"]
        for gj, jt, ana in contour:
            clines.append(f"{_r(gj)},{_r(jt)},{'' if ana is None else _r(ana)}")
        (out / "contour.csv").write_text("\n".join(clines) + "\n")
    if "json" in fmts:
        _write_json(
            out / "scan_report.json",
            {
                "mode": "scan",
                "model": model.value,
                "waveform": waveform.value,
                "grid": {
                    "gamma_over_j": [_f(g) for g in gammas],
                    "jt": [_f(t) for t in jts],
                },
                "contour": [
                    {
                        "gamma_over_j": _f(gj),
                        "jt": _f(jt),
                        "analytic_gamma_over_j": None if ana is None else _f(ana),
                    }
                    for gj, jt, ana in contour
                ],
                "failures": failures,
            },
        )
    print(f"scan: {len(points)} points, {len(contour)} contour points, "
          f"{len(failures)} failures")
    return 0


def _refine_contour(model, waveform, gammas, jts, args):
    """Bisection refinement of phase-boundary crossings along each JT row."""
    contour = []
    for jt in jts:
        def disc(gj, jt=jt):
            p = md.DimerParams(J=args.J, gamma=gj * args.J, T=jt / args.J, waveform=waveform)
            if waveform is md.Waveform.STATIC:
                # both builtin static dimers break PT at gamma = J
                return 1.0 - gj * gj
            return md.numerical_discriminant(model, p)

        vals = [disc(gj) for gj in gammas]
        for i in range(len(gammas) - 1):
            lo, hi = gammas[i], gammas[i + 1]
            if lo == hi or vals[i] == 0.0 or vals[i] * vals[i + 1] > 0:
                continue
            lo = max(lo, 1e-9)
            try:
                root = brentq(disc, lo, hi, xtol=1e-10)
            except ValueError:
                continue
            analytic = None
            if waveform is md.Waveform.DELTA_KICKS and model is md.Model.CLASSICAL:
                try:
                    analytic = md.classical_ep_gamma(jt, args.J)
                except ValueError:
                    pass
            elif waveform is md.Waveform.STATIC:
                analytic = 1.0
            contour.append((float(root), float(jt), analytic))
    return contour


def run_verify(args) -> int:
    tols = {}
    if args.tol_override is not None:
        tols["residual"] = args.tol_override
    results = selfcheck.run_all(tols)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        detail = f"  {r.detail}" if r.detail else ""
        print(f"[{status}] {r.name:<{width}}{detail}")
        failed += 0 if r.ok else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 3


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intertwine",
        description="Conserved quantities of non-Hermitian Hamiltonians via superoperator spectra",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--model", help="builtin model: quantum-dimer | classical-dimer")
        p.add_argument("--input", help="JSON input file (raw matrix or schedule)")
        p.add_argument("--gamma", type=float, default=0.5, help="gain-loss strength in units of J")
        p.add_argument("--J", type=float, default=1.0, help="coupling")
        p.add_argument("--JT", type=float, default=1.0, help="period in units of 1/J")
        p.add_argument("--waveform", help="static | square | kicks")
        p.add_argument("--tol-eig", type=float, default=DEFAULT_TOL_EIG)
        p.add_argument("--tol-rank", type=float, default=DEFAULT_TOL_RANK)
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--format", default="csv,json", help="subset of csv,json,gnuplot")

    p_static = sub.add_parser("static", help="static-Hamiltonian analysis")
    common(p_static)
    p_static.set_defaults(func=run_static)

    p_floquet = sub.add_parser("floquet", help="one-period propagator analysis")
    common(p_floquet)
    p_floquet.set_defaults(func=run_floquet)

    p_trace = sub.add_parser("trace", help="normalized expectation-value traces")
    common(p_trace)
    p_trace.add_argument("--psi0", help="initial state as 're,im;re,im'")
    p_trace.add_argument("--steps-per-period", type=int, default=200)
    p_trace.add_argument("--periods", type=int, default=10)
    p_trace.set_defaults(func=run_trace)

    p_scan = sub.add_parser("scan", help="phase diagram over (gamma/J, JT)")
    common(p_scan)
    p_scan.add_argument("--grid", default="0:2:21,0.2:3:15", help="gmin:gmax:n,tmin:tmax:n")
    p_scan.set_defaults(func=run_scan)

    p_verify = sub.add_parser("verify", help="run the built-in invariant suite")
    p_verify.add_argument("--tol-override", type=float, default=None,
                          help="replace every check threshold by this value")
    p_verify.set_defaults(func=run_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, np.linalg.LinAlgError, OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
