"""Wigner quasi-probability functions via two independent evaluation routes.

Convention: W(gamma) integrates to 1 over d^2 gamma, is bounded by 2/pi in
magnitude, and a coherent state |alpha> gives W(gamma) = (2/pi) e^{-2|gamma-alpha|^2}
(peak at gamma = alpha).  Both evaluators below are pinned to this scaling.

Route 1 (`wigner_fock`) works for any state: it expands the displaced-parity
expectation in the Fock basis using displacement matrix elements.  The
elements are generated by a scaled associated-Laguerre three-term recurrence
whose intermediates are themselves unitary-matrix entries (|S| <= 1), so it
stays at machine precision even for |gamma| ~ 10 and dim ~ 100, where the
naive prefactor * polynomial split overflows or cancels.

Route 2 (`wigner_kerr_series`) evaluates the Kerr-state double power series
directly from (alpha, tau) and serves as the independent cross-check.  Float64
cancellation limits it to |alpha| <= 2-ish; route 1 has no such limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, pi

import numpy as np

from .fock import StateVector
from .kerr import KerrParams

__all__ = [
    "WignerGrid",
    "SeriesConvergenceError",
    "wigner_fock",
    "wigner_kerr_series",
    "wigner_grid",
    "auto_window",
    "negativity_volume",
    "grid_to_csv",
    "grid_to_gnuplot",
    "grid_to_json",
]

WIGNER_BOUND = 2.0 / pi
BOUND_SLACK = 1e-9


class SeriesConvergenceError(RuntimeError):
    """The double series failed to satisfy its termination rule within the term cap."""


@dataclass
class WignerGrid:
    """Rectangular phase-space sampling of W at cell centers.

    values[j, i] is W at gamma = xs[i] + 1j*ys[j]; xs/ys are the centers of
    an nx-by-ny cell partition of the window, so sum(values)*cell_area is the
    midpoint-rule integral.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int
    values: np.ndarray
    method: str

    @property
    def cell_area(self) -> float:
        return (self.x_max - self.x_min) / self.nx * (self.y_max - self.y_min) / self.ny

    def xs(self) -> np.ndarray:
        return self.x_min + (np.arange(self.nx) + 0.5) * (self.x_max - self.x_min) / self.nx

    def ys(self) -> np.ndarray:
        return self.y_min + (np.arange(self.ny) + 0.5) * (self.y_max - self.y_min) / self.ny

    def integral(self) -> float:
        return float(np.sum(self.values) * self.cell_area)

    def rows(self):
        """(x, y, w) triples ordered by increasing y, then x."""
        xs, ys = self.xs(), self.ys()
        for j in range(self.ny):
            for i in range(self.nx):
                yield float(xs[i]), float(ys[j]), float(self.values[j, i])


def wigner_fock(s: StateVector, gammas):
    """W(gamma) for any normalized state; scalar or array of phase-space points.

    W(gamma) = (2/pi) sum_{n,m} conj(c_n) c_m (-1)^m <n|D(2 gamma)|m>
    with D_{m+k,m}(beta) = S^k_m e^{i k arg beta} and the scaled magnitudes
      S^k_m = sqrt(m!/(m+k)!) |beta|^k e^{-x/2} L^k_m(x),   x = |beta|^2,
    generated by
      S^k_{m+1} = ((2m+k+1-x) S^k_m - sqrt(m(m+k)) S^k_{m-1})
                  / sqrt((m+1)(m+k+1)).
    The diagonal stripe pairing makes the output real by construction.
    """
    amps = s.amps
    dim = s.dim
    g = np.atleast_1d(np.asarray(gammas, dtype=complex))
    beta = 2.0 * g
    x = np.abs(beta) ** 2
    nonzero = x > 0.0
    log_b = np.where(nonzero, 0.5 * np.log(np.where(nonzero, x, 1.0)), -np.inf)
    unit = np.where(nonzero, beta / np.where(nonzero, np.sqrt(x), 1.0), 1.0 + 0.0j)
    signs = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)

    total = np.zeros(g.shape, dtype=float)
    for k in range(dim):
        # stripe weight w_m = (-1)^m conj(c_{m+k}) c_m
        w = signs[: dim - k] * np.conj(amps[k:]) * amps[: dim - k]
        if not np.any(w):
            continue
        if k == 0:
            s_prev = np.exp(-0.5 * x)
        else:
            with np.errstate(invalid="ignore"):
                s_prev = np.exp(-0.5 * x + k * log_b - 0.5 * lgamma(k + 1.0))
            s_prev = np.where(np.isfinite(s_prev), s_prev, 0.0)
        acc = w[0] * s_prev
        s_cur = s_prev
        for m in range(dim - k - 1):
            if m == 0:
                s_cur = (k + 1.0 - x) * s_prev / np.sqrt(k + 1.0)
            else:
                s_cur, s_prev = (
                    ((2.0 * m + k + 1.0 - x) * s_cur - np.sqrt(m * (m + k)) * s_prev)
                    / np.sqrt((m + 1.0) * (m + k + 1.0)),
                    s_cur,
                )
            acc = acc + w[m + 1] * s_cur
        if k == 0:
            total += acc.real
        else:
            total += 2.0 * (acc * unit**k).real
    out = (2.0 / pi) * total
    return out if np.ndim(gammas) else float(out[0])


def _terminate(partial: complex, term: complex, tol: float, run: int) -> tuple[bool, int]:
    """Termination rule: 5 consecutive terms below tol*(|partial| + tiny)."""
    if abs(term) < tol * (abs(partial) + 1e-300):
        run += 1
    else:
        run = 0
    return run >= 5, run


def wigner_kerr_series(
    p: KerrParams, gamma: complex, tol: float = 1e-10, max_terms: int = 500
) -> float:
    """Kerr-state Wigner function from the direct double power series.

    W = (2/pi) e^{-2|gamma|^2 - |alpha|^2}
        * sum_q (2 conj(alpha) gamma e^{i tau/2})^q / q! * e^{-i tau/2 q^2}
        * sum_k (2 alpha conj(gamma) e^{-i tau/2})^k / k! * e^{i tau/2 k^2}
          * e^{-|alpha|^2 e^{i tau (k-q)}}

    Each sum stops once five consecutive terms fall below tol times the
    running partial magnitude; exceeding `max_terms` raises
    SeriesConvergenceError.  Cancellation keeps float64 accuracy only for
    |alpha| <= 2 and |gamma| <= ~4; use `wigner_fock` beyond that.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    alpha = complex(p.alpha)
    gamma = complex(gamma)
    tau = p.tau
    a2 = abs(alpha) ** 2
    pref = (2.0 / pi) * np.exp(-2.0 * abs(gamma) ** 2 - a2)
    base_outer = 2.0 * np.conj(alpha) * gamma * np.exp(1j * tau / 2.0)
    base_inner = 2.0 * alpha * np.conj(gamma) * np.exp(-1j * tau / 2.0)

    total = 0.0 + 0.0j
    outer_run = 0
    a_q = 1.0 + 0.0j  # base_outer^q / q! * e^{-i tau/2 q^2}
    for q in range(max_terms):
        if q > 0:
            a_q = a_q * base_outer / q * np.exp(-1j * tau / 2.0 * (2.0 * q - 1.0))
        inner = 0.0 + 0.0j
        inner_run = 0
        b_k = 1.0 + 0.0j  # base_inner^k / k! * e^{i tau/2 k^2}
        for k in range(max_terms):
            if k > 0:
                b_k = b_k * base_inner / k * np.exp(1j * tau / 2.0 * (2.0 * k - 1.0))
            term = b_k * np.exp(-a2 * np.exp(1j * tau * (k - q)))
            inner += term
            done, inner_run = _terminate(inner, term, tol, inner_run)
            if done:
                break
        else:
            raise SeriesConvergenceError(
                f"inner sum not converged after {max_terms} terms at gamma={gamma}"
            )
        outer_term = a_q * inner
        total += outer_term
        done, outer_run = _terminate(total, outer_term, tol, outer_run)
        if done:
            break
    else:
        raise SeriesConvergenceError(
            f"outer sum not converged after {max_terms} terms at gamma={gamma}"
        )
    return float((pref * total).real)


def auto_window(s: StateVector) -> tuple[float, float, float, float]:
    """Square window sized from the state's photon content: half = sqrt(<n>) + 3.5."""
    mean_n = float(np.sum(np.arange(s.dim) * s.probabilities()))
    half = np.sqrt(mean_n) + 3.5
    return (-half, half, -half, half)


def wigner_grid(
    s: StateVector,
    window: tuple[float, float, float, float] | None = None,
    nx: int = 101,
    ny: int = 101,
) -> WignerGrid:
    """Sample wigner_fock on cell centers of an nx-by-ny window partition."""
    if nx < 2 or ny < 2:
        raise ValueError("nx and ny must be >= 2")
    if window is None:
        window = auto_window(s)
    x_min, x_max, y_min, y_max = (float(v) for v in window)
    if not (x_max > x_min and y_max > y_min):
        raise ValueError(f"degenerate window {window}")
    xs = x_min + (np.arange(nx) + 0.5) * (x_max - x_min) / nx
    ys = y_min + (np.arange(ny) + 0.5) * (y_max - y_min) / ny
    pts = xs[None, :] + 1j * ys[:, None]
    values = wigner_fock(s, pts.ravel()).reshape(ny, nx)
    if values.min() < -WIGNER_BOUND - BOUND_SLACK or values.max() > WIGNER_BOUND + BOUND_SLACK:
        raise ArithmeticError(
            f"Wigner values escaped the 2/pi bound: [{values.min():.3e}, {values.max():.3e}]"
        )
    return WignerGrid(x_min, x_max, y_min, y_max, nx, ny, values, method="fock-parity")


def kerr_series_grid(
    p: KerrParams,
    window: tuple[float, float, float, float],
    nx: int,
    ny: int,
    tol: float = 1e-10,
) -> WignerGrid:
    """Same sampling as wigner_grid but through the direct double series."""
    if nx < 2 or ny < 2:
        raise ValueError("nx and ny must be >= 2")
    x_min, x_max, y_min, y_max = (float(v) for v in window)
    if not (x_max > x_min and y_max > y_min):
        raise ValueError(f"degenerate window {window}")
    xs = x_min + (np.arange(nx) + 0.5) * (x_max - x_min) / nx
    ys = y_min + (np.arange(ny) + 0.5) * (y_max - y_min) / ny
    values = np.empty((ny, nx))
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            values[j, i] = wigner_kerr_series(p, complex(x, y), tol=tol)
    return WignerGrid(x_min, x_max, y_min, y_max, nx, ny, values, method="kerr-series")


def negativity_volume(g: WignerGrid, integral_tol: float = 5e-3) -> float:
    """Riemann sum of |min(W, 0)| over the grid.

    Requires the grid to actually capture the state: its integral must be
    within `integral_tol` of 1.
    """
    integral = g.integral()
    if abs(integral - 1.0) > integral_tol:
        raise ValueError(
            f"grid integral {integral:.6f} deviates from 1 by more than {integral_tol:g}; "
            "enlarge the window or resolution"
        )
    return float(np.sum(np.abs(np.minimum(g.values, 0.0))) * g.cell_area)


# ---------------------------------------------------------------------------
# plot-ready text emitters (17 significant digits, deterministic)
# ---------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _header_lines(g: WignerGrid, extra: dict | None) -> list[str]:
    lines = [
        f"window: x_min={_fmt(g.x_min)} x_max={_fmt(g.x_max)} "
        f"y_min={_fmt(g.y_min)} y_max={_fmt(g.y_max)}",
        f"resolution: nx={g.nx} ny={g.ny}",
        f"method: {g.method}",
    ]
    for key, val in (extra or {}).items():
        lines.append(f"{key}: {_fmt(val) if isinstance(val, float) else val}")
    return lines


def grid_to_csv(g: WignerGrid, extra: dict | None = None) -> str:
    out = ["# " + line for line in _header_lines(g, extra)]
    out.append("x,y,w")
    for x, y, w in g.rows():
        out.append(f"{_fmt(x)},{_fmt(y)},{_fmt(w)}")
    return "\n".join(out) + "\n"


def grid_to_gnuplot(g: WignerGrid, extra: dict | None = None) -> str:
    """Matrix layout: one row per y (increasing), nx values per row."""
    out = ["# " + line for line in _header_lines(g, extra)]
    for j in range(g.ny):
        out.append(" ".join(_fmt(v) for v in g.values[j]))
    return "\n".join(out) + "\n"


def grid_to_json(g: WignerGrid, extra: dict | None = None) -> str:
    # assembled by hand so the values honor the 17-significant-digit contract
    meta = {
        "x_min": _fmt(g.x_min),
        "x_max": _fmt(g.x_max),
        "y_min": _fmt(g.y_min),
        "y_max": _fmt(g.y_max),
        "nx": str(g.nx),
        "ny": str(g.ny),
    }
    lines = ["{"]
    for key, val in meta.items():
        lines.append(f'  "{key}": {val},')
    lines.append(f'  "method": "{g.method}",')
    for key, val in (extra or {}).items():
        if isinstance(val, float):
            body = "null" if np.isnan(val) else _fmt(val)
            lines.append(f'  "{key}": {body},')
        else:
            lines.append(f'  "{key}": "{val}",')
    rows = [
        "    [" + ", ".join(_fmt(v) for v in g.values[j]) + "]" for j in range(g.ny)
    ]
    lines.append('  "values": [')
    lines.append(",\n".join(rows))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"
