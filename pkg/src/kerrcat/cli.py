"""kerrcat command line: figure-reproduction and schedule-generation workflows.

Every command writes deterministic payload files (17-significant-digit
numbers, no timestamps); pass --plot to also render a matplotlib figure next
to the payload.  Option values resolve as: command-line flag, then config
file entry, then built-in default.  KERRCAT_OUTDIR sets the directory for
relative output paths.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .fock import (
    StateVector,
    coherent,
    default_dim,
    fidelity,
    load_state,
    quadrature_moments,
    save_state,
    truncate,
)
from .kerr import (
    KerrParams,
    kerr_evolve,
    parse_tau,
    quadrature_variances_closed_form,
    reconstruct_superposition,
    revival_decompose,
    superposition_rows,
)
from .wigner import (
    auto_window,
    grid_to_csv,
    grid_to_gnuplot,
    grid_to_json,
    kerr_series_grid,
    negativity_volume,
    wigner_grid,
)
from .ionsynth import (
    TargetSpec,
    schedule_from_json,
    schedule_table,
    schedule_to_json,
    simulate_schedule,
    synthesize,
    to_physical,
)

OUTDIR_ENV = "KERRCAT_OUTDIR"
NORM_TOL = 1e-9


class CliError(ValueError):
    """Bad command input; the offending key is named in the message."""


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


# ---------------------------------------------------------------------------
# option resolution: flag > config file > default
# ---------------------------------------------------------------------------

def _read_config(path: str) -> dict[str, str]:
    cfg = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"config: cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"config: line {lineno} is not 'key = value': {raw!r}")
        key, _, value = line.partition("=")
        cfg[key.strip()] = value.strip()
    return cfg


class Options:
    """Merged view of argparse values and config file entries."""

    def __init__(self, args: argparse.Namespace):
        self.args = vars(args)
        self.config = _read_config(args.config) if getattr(args, "config", None) else {}

    def raw(self, key: str):
        flag = self.args.get(key.replace("-", "_"))
        if flag is not None:
            return flag
        return self.config.get(key)

    def get(self, key: str, cast, default=None, required: bool = False):
        value = self.raw(key)
        if value is None:
            if required:
                raise CliError(f"{key}: required parameter is missing")
            return default
        try:
            return cast(value)
        except CliError:
            raise
        except (TypeError, ValueError) as exc:
            raise CliError(f"{key}: cannot parse {value!r} ({exc})") from exc

    def flag(self, key: str) -> bool:
        value = self.raw(key)
        if isinstance(value, str):
            return value.lower() in ("1", "true", "yes", "on")
        return bool(value)


def _cast_complex(text) -> complex:
    if isinstance(text, complex):
        return text
    return complex(str(text).replace(" ", ""))


def _cast_tau(text) -> tuple[float, Fraction | None]:
    return parse_tau(str(text))


def _cast_window(text):
    if str(text).strip().lower() == "auto":
        return None
    parts = [p for chunk in str(text).split(",") for p in chunk.split(":") if p]
    if len(parts) != 4:
        raise ValueError("window must be 'auto' or four numbers x_min,x_max,y_min,y_max")
    return tuple(float(p) for p in parts)


def _cast_alpha_list(text):
    vals = [float(p) for p in str(text).split(",") if p.strip()]
    if not vals:
        raise ValueError("expected a comma-separated list of amplitudes")
    return vals


def _out_path(opts: Options, default_name: str) -> Path:
    out = opts.get("out", str, default=default_name)
    path = Path(out)
    if not path.is_absolute():
        base = os.environ.get(OUTDIR_ENV)
        if base:
            path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    print(f"wrote {path}")


def _load_normalized_state(path: str) -> StateVector:
    try:
        s = load_state(path)
    except OSError as exc:
        raise CliError(f"state: cannot read {path}: {exc}") from exc
    if abs(s.norm() - 1.0) > NORM_TOL:
        raise CliError(
            f"state: {path} is not normalized (norm = {s.norm():.12g}); refusing to fix it silently"
        )
    return s


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_kerr_evolve(opts: Options) -> int:
    alpha = opts.get("alpha", _cast_complex, required=True)
    tau, _ = opts.get("tau", _cast_tau, required=True)
    dim = opts.get("dim", int, default=default_dim(alpha))
    if dim < 1:
        raise CliError(f"dim: must be >= 1, got {dim}")
    state = kerr_evolve(KerrParams(alpha, tau), dim)
    path = _out_path(opts, "kerr_state.json")
    save_state(state, path)
    print(f"wrote {path}")
    print(f"norm = {state.norm():.12f}")
    probs = state.probabilities()
    top = np.argsort(probs)[::-1][:5]
    for n in top:
        print(f"  P(n={int(n)}) = {probs[n]:.4f}")
    return 0


def cmd_quadratures(opts: Options) -> int:
    alpha = opts.get("alpha", float, required=True)
    tau_min, _ = opts.get("tau-min", _cast_tau, default=(0.0, None))
    tau_max, _ = opts.get("tau-max", _cast_tau, default=parse_tau("2 pi"))
    points = opts.get("points", int, default=100)
    method = opts.get("method", str, default="closed")
    if points < 2:
        raise CliError(f"points: need at least 2, got {points}")
    if method not in ("closed", "numeric"):
        raise CliError(f"method: expected 'closed' or 'numeric', got {method!r}")
    taus = np.linspace(tau_min, tau_max, points)
    rows = []
    if method == "closed":
        for t in taus:
            v1, v2 = quadrature_variances_closed_form(KerrParams(alpha, float(t)))
            rows.append((float(t), v1, v2))
    else:
        dim = opts.get("dim", int, default=default_dim(alpha))
        for t in taus:
            s = kerr_evolve(KerrParams(alpha, float(t)), dim)
            _, _, v1, v2 = quadrature_moments(s)
            rows.append((float(t), v1, v2))
    lines = [f"# alpha: {_fmt(alpha)}", f"# method: {method}", "tau,var_x1,var_x2"]
    lines += [f"{_fmt(t)},{_fmt(v1)},{_fmt(v2)}" for t, v1, v2 in rows]
    path = _out_path(opts, "quadratures.csv")
    _write(path, "\n".join(lines) + "\n")
    if opts.flag("plot"):
        from .plotting import render_variance_curves

        fig_path = path.with_suffix(".png")
        render_variance_curves(rows, fig_path, title=f"alpha = {alpha:g} ({method})")
        print(f"wrote {fig_path}")
    return 0


def _state_from_opts(opts: Options) -> tuple[StateVector, complex | None, float | None]:
    """State plus (alpha, tau) when it was built inline from Kerr parameters."""
    state_file = opts.get("state", str)
    alpha = opts.get("alpha", _cast_complex)
    if state_file is not None and alpha is not None:
        raise CliError("state: give either --state or --alpha/--tau, not both")
    if state_file is not None:
        return _load_normalized_state(state_file), None, None
    if alpha is None:
        raise CliError("state: need --state FILE or inline --alpha/--tau parameters")
    tau, _ = opts.get("tau", _cast_tau, required=True)
    dim = opts.get("dim", int, default=default_dim(alpha))
    return kerr_evolve(KerrParams(alpha, tau), dim), alpha, tau


def cmd_wigner_grid(opts: Options) -> int:
    state, alpha, tau = _state_from_opts(opts)
    cut = opts.get("truncate", int)
    if cut is not None:
        if not 0 <= cut < state.dim:
            raise CliError(f"truncate: M={cut} outside 0..{state.dim - 1}")
        state, _ = truncate(state, cut)
    window = opts.get("window", _cast_window, default=None)
    if window is None:
        window = auto_window(state)
    nx = opts.get("nx", int, default=101)
    ny = opts.get("ny", int, default=101)
    fmt = opts.get("format", str, default="csv")
    if fmt not in ("csv", "json", "gnuplot"):
        raise CliError(f"format: expected csv, json, or gnuplot, got {fmt!r}")
    grid = wigner_grid(state, window=window, nx=nx, ny=ny)
    integral = grid.integral()
    try:
        neg = negativity_volume(grid)
    except ValueError:
        neg = float("nan")
    extra = {"integral": integral, "negativity_volume": neg}

    both = opts.flag("both-methods")
    series_grid = None
    if both:
        if alpha is None:
            raise CliError("both-methods: requires inline --alpha/--tau (the series needs them)")
        tol = opts.get("series-tol", float, default=1e-10)
        series_grid = kerr_series_grid(KerrParams(alpha, tau), window, nx, ny, tol=tol)
        diff = float(np.max(np.abs(series_grid.values - grid.values)))
        extra["dual_method_max_abs_diff"] = diff
        print(f"dual-method max abs difference = {diff:.3e}")

    emit = {"csv": grid_to_csv, "json": grid_to_json, "gnuplot": grid_to_gnuplot}[fmt]
    ext = {"csv": ".csv", "json": ".json", "gnuplot": ".dat"}[fmt]
    path = _out_path(opts, f"wigner{ext}")
    _write(path, emit(grid, extra))
    if series_grid is not None:
        series_path = path.with_name(path.stem + "-series" + path.suffix)
        _write(series_path, emit(series_grid, extra))
    print(f"integral = {integral:.6f}")
    print(f"negativity_volume = {neg:.6g}")
    if opts.flag("plot"):
        from .plotting import render_wigner_grid

        fig_path = path.with_suffix(".png")
        title = f"alpha={alpha:g}, tau={tau:.4g}" if alpha is not None else None
        render_wigner_grid(grid, fig_path, title=title)
        print(f"wrote {fig_path}")
    return 0


def cmd_decompose(opts: Options) -> int:
    alpha = opts.get("alpha", _cast_complex, required=True)
    tau, frac = opts.get("tau", _cast_tau, required=True)
    if frac is None:
        raise CliError(
            "tau: decomposition needs the exact rational form 'p/q pi' (e.g. '1/2 pi'), "
            "not a float"
        )
    ratio = Fraction(frac, 2)  # tau/(2 pi)
    p_num, q = ratio.numerator % ratio.denominator, ratio.denominator
    if p_num == 0:
        p_num, q = 0, 1
    if q == 1:
        # full revival: the state is the coherent state itself
        sup_rows = [(0.0, 1.0, 0.0)]
        fid = 1.0
        n_terms = 1
    else:
        sup = revival_decompose(KerrParams(alpha, tau), q, p_num)
        dim = max(default_dim(alpha), 4 * q)
        rec, _ = reconstruct_superposition(sup, dim)
        fid = fidelity(rec, kerr_evolve(KerrParams(alpha, tau), dim))
        sup_rows = superposition_rows(sup)
        n_terms = len(sup)
    lines = [
        f"# alpha: {_fmt(abs(complex(alpha)))}",
        f"# tau: {frac} pi",
        f"# terms: {n_terms}",
        f"# reconstruction_fidelity: {_fmt(fid)}",
        "angle,coeff_re,coeff_im",
    ]
    lines += [f"{_fmt(a)},{_fmt(re)},{_fmt(im)}" for a, re, im in sup_rows]
    path = _out_path(opts, "superposition.csv")
    _write(path, "\n".join(lines) + "\n")
    print(f"{n_terms} coherent components, reconstruction fidelity = {fid:.12f}")
    for a, re, im in sup_rows:
        print(f"  angle {a:+.4f}: {re:+.4f}{im:+.4f}i")
    return 0


def cmd_truncation_scan(opts: Options) -> int:
    alphas = opts.get("alphas", _cast_alpha_list, required=True)
    m_max = opts.get("m-max", int, default=60)
    if m_max < 0:
        raise CliError(f"m-max: must be >= 0, got {m_max}")
    rows = []
    for a in alphas:
        src = coherent(a, max(default_dim(a), m_max + 2))
        for m in range(m_max + 1):
            _, report = truncate(src, m)
            rows.append((a, m, report.kept_probability, report.fidelity_to_full))
    lines = ["alpha,M,kept_probability,fidelity_to_full"]
    lines += [f"{_fmt(a)},{m},{_fmt(k)},{_fmt(f)}" for a, m, k, f in rows]
    path = _out_path(opts, "truncation_scan.csv")
    _write(path, "\n".join(lines) + "\n")
    for a in alphas:
        needed = next((m for aa, m, k, _ in rows if aa == a and k > 0.999), None)
        label = str(needed) if needed is not None else f"> {m_max}"
        print(f"alpha = {a:g}: smallest M with kept probability > 0.999: {label}")
    if opts.flag("plot"):
        from .plotting import render_truncation_scan

        fig_path = path.with_suffix(".png")
        render_truncation_scan(rows, fig_path)
        print(f"wrote {fig_path}")
    return 0


def cmd_synth(opts: Options) -> int:
    alpha = opts.get("alpha", _cast_complex, required=True)
    tau, _ = opts.get("tau", _cast_tau, required=True)
    m_cut = opts.get("m", int, required=True)
    eta = opts.get("eta", float, default=0.02)
    mode = opts.get("mode", str, default="fixed-rabi")
    carrier_rabi = opts.get("carrier-rabi", float, default=1e6)
    red_rabi = opts.get("red-rabi", float, default=1e5)
    duration = opts.get("duration", float, default=1e-6)
    conv = opts.get("convention-factor", int, default=1)
    if m_cut < 0:
        raise CliError(f"m: must be >= 0, got {m_cut}")
    if mode not in ("fixed-rabi", "fixed-duration"):
        raise CliError(f"mode: expected fixed-rabi or fixed-duration, got {mode!r}")
    if conv not in (1, 2):
        raise CliError(f"convention-factor: expected 1 or 2, got {conv}")
    if eta <= 0:
        raise CliError(f"eta: must be positive, got {eta}")

    target_state = kerr_evolve(KerrParams(alpha, tau), m_cut + 1)
    target = TargetSpec.from_state(target_state)
    result = synthesize(target, eta)
    sched = to_physical(
        result.pulses,
        mode,
        carrier_rabi=carrier_rabi,
        red_rabi=red_rabi,
        fixed_duration=duration,
        eta=eta,
        convention_factor=conv,
        global_phase=result.global_phase,
    )
    final = simulate_schedule(sched)
    fid = abs(np.vdot(final.amps_g[: m_cut + 1], target_state.amps)) ** 2
    leak = final.excited_population()

    path = _out_path(opts, "schedule.json")
    _write(path, schedule_to_json(sched))
    table_path = path.with_suffix(".txt")
    _write(table_path, schedule_table(sched))
    report = {
        "fidelity": fid,
        "pulse_count": len(result.pulses),
        "excited_leakage": leak,
        "global_phase": [result.global_phase.real, result.global_phase.imag],
    }
    report_path = path.with_name(path.stem + "-report.json")
    _write(report_path, json.dumps(report, indent=1) + "\n")
    print(f"pulses = {len(result.pulses)}")
    print(f"fidelity = {fid:.12f}")
    print(f"excited_leakage = {leak:.3e}")
    print(
        f"global_phase = {result.global_phase.real:+.4f}{result.global_phase.imag:+.4f}i"
    )
    if opts.flag("plot"):
        from .plotting import render_schedule

        fig_path = path.with_suffix(".png")
        render_schedule(sched, fig_path)
        print(f"wrote {fig_path}")
    return 0


def cmd_simulate(opts: Options) -> int:
    sched_file = opts.get("schedule", str, required=True)
    try:
        sched = schedule_from_json(Path(sched_file).read_text())
    except OSError as exc:
        raise CliError(f"schedule: cannot read {sched_file}: {exc}") from exc
    except (KeyError, ValueError) as exc:
        raise CliError(f"schedule: malformed file {sched_file}: {exc}") from exc
    final = simulate_schedule(sched)
    leak = final.excited_population()
    motional = final.motional_ground_part()
    norm = motional.norm()
    if norm == 0:
        raise CliError("schedule: the simulated state has no ground-manifold support")
    out_state = motional.normalized()
    path = _out_path(opts, "simulated_state.json")
    save_state(out_state, path)
    print(f"wrote {path}")
    print(f"excited_leakage = {leak:.3e}")
    print(f"ground_norm = {norm:.12f}")
    target_file = opts.get("target", str)
    if target_file:
        target = _load_normalized_state(target_file)
        if target.dim <= out_state.dim:
            fid = fidelity(out_state, target.padded(out_state.dim))
        else:
            fid = fidelity(out_state.padded(target.dim), target)
        print(f"fidelity_vs_target = {fid:.12f}")
    return 0


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key = value config file")
    sub.add_argument("--out", help="output path (relative paths honor KERRCAT_OUTDIR)")
    sub.add_argument("--plot", action="store_true", default=None,
                     help="also render a matplotlib figure next to the output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kerrcat",
        description="Kerr-medium cat states, Wigner functions, and ion pulse synthesis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kerr-evolve", help="evolve a coherent state and write it as JSON")
    p.add_argument("--alpha", help="initial coherent amplitude (complex accepted)")
    p.add_argument("--tau", help="evolution parameter: float or 'p/q pi'")
    p.add_argument("--dim", type=int, help="truncation dimension (default: auto)")
    _add_common(p)
    p.set_defaults(func=cmd_kerr_evolve)

    p = sub.add_parser("quadratures", help="variance curves var(X1), var(X2) over tau")
    p.add_argument("--alpha", help="coherent amplitude (real)")
    p.add_argument("--tau-min", help="grid start (default 0)")
    p.add_argument("--tau-max", help="grid end (default '2 pi')")
    p.add_argument("--points", type=int, help="grid size (default 100)")
    p.add_argument("--method", choices=["closed", "numeric"], help="default closed")
    p.add_argument("--dim", type=int, help="dimension for the numeric method")
    _add_common(p)
    p.set_defaults(func=cmd_quadratures)

    p = sub.add_parser("wigner-grid", help="sample the Wigner function on a grid")
    p.add_argument("--alpha", help="inline Kerr state: coherent amplitude")
    p.add_argument("--tau", help="inline Kerr state: evolution parameter")
    p.add_argument("--dim", type=int, help="inline state dimension (default: auto)")
    p.add_argument("--state", help="read the state from a JSON file instead")
    p.add_argument("--truncate", type=int, help="cut the state at level M first")
    p.add_argument("--window", help="'auto' or x_min,x_max,y_min,y_max")
    p.add_argument("--nx", type=int, help="horizontal resolution (default 101)")
    p.add_argument("--ny", type=int, help="vertical resolution (default 101)")
    p.add_argument("--format", choices=["csv", "json", "gnuplot"], help="default csv")
    p.add_argument("--both-methods", action="store_true", default=None,
                   help="also evaluate the direct series and report the difference")
    p.add_argument("--series-tol", type=float, help="series termination tolerance")
    _add_common(p)
    p.set_defaults(func=cmd_wigner_grid)

    p = sub.add_parser("decompose", help="coherent-state decomposition at tau = p/q pi")
    p.add_argument("--alpha", help="coherent amplitude")
    p.add_argument("--tau", help="exact rational form 'p/q pi' (required form)")
    _add_common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("truncation-scan", help="kept probability vs cutoff M")
    p.add_argument("--alphas", help="comma-separated amplitudes, e.g. 1,2,5")
    p.add_argument("--m-max", type=int, help="largest cutoff (default 60)")
    _add_common(p)
    p.set_defaults(func=cmd_truncation_scan)

    p = sub.add_parser("synth", help="synthesize the pulse schedule for a truncated Kerr target")
    p.add_argument("--alpha", help="coherent amplitude")
    p.add_argument("--tau", help="evolution parameter: float or 'p/q pi'")
    p.add_argument("--m", type=int, help="target cutoff M (2M pulses)")
    p.add_argument("--eta", type=float, help="Lamb-Dicke parameter (default 0.02)")
    p.add_argument("--mode", choices=["fixed-rabi", "fixed-duration"], help="default fixed-rabi")
    p.add_argument("--carrier-rabi", type=float, help="carrier Rabi, rad/s (default 1e6)")
    p.add_argument("--red-rabi", type=float, help="red-sideband Rabi, rad/s (default 1e5)")
    p.add_argument("--duration", type=float, help="common duration for fixed-duration mode (s)")
    p.add_argument("--convention-factor", type=int, choices=[1, 2],
                   help="pulse-area convention: theta = Omega t / factor (default 1)")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", help="forward-simulate a schedule file from |0,g>")
    p.add_argument("--schedule", help="schedule JSON produced by synth")
    p.add_argument("--target", help="optional state JSON to report fidelity against")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse has already printed its message
        return int(exc.code or 0)
    try:
        opts = Options(args)
        return args.func(opts)
    except (CliError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
