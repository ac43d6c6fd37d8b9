"""Truncated Fock-space states and the elementary operations everything else builds on.

A state is a complex amplitude vector over Fock levels 0..dim-1.  All
operations are pure: they never mutate their inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "StateVector",
    "TruncationReport",
    "coherent",
    "fock",
    "inner_product",
    "fidelity",
    "truncate",
    "quadrature_moments",
    "parity_expectation",
    "default_dim",
    "state_to_json",
    "state_from_json",
    "save_state",
    "load_state",
]

NORM_TOL = 1e-9


class StateVector:
    """Immutable pure state over Fock levels 0..dim-1."""

    __slots__ = ("_amps",)

    def __init__(self, amps):
        arr = np.asarray(amps, dtype=complex)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("amps must be a non-empty 1-D complex sequence")
        if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
            raise ValueError("amps must be finite (no NaN/Inf)")
        arr.setflags(write=False)
        self._amps = arr

    @property
    def amps(self) -> np.ndarray:
        return self._amps

    @property
    def dim(self) -> int:
        return self._amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self._amps))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self._amps / n)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) < tol

    def probabilities(self) -> np.ndarray:
        return np.abs(self._amps) ** 2

    def padded(self, dim: int) -> "StateVector":
        """Zero-pad (or reject shrinking) to the requested dimension."""
        if dim < self.dim:
            raise ValueError(f"padded dim {dim} smaller than current dim {self.dim}")
        out = np.zeros(dim, dtype=complex)
        out[: self.dim] = self._amps
        return StateVector(out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StateVector)
            and self.dim == other.dim
            and bool(np.array_equal(self._amps, other._amps))
        )

    def __repr__(self) -> str:
        return f"StateVector(dim={self.dim}, norm={self.norm():.6f})"


@dataclass(frozen=True)
class TruncationReport:
    """What survived a cutoff at Fock level M."""

    M: int
    kept_probability: float
    fidelity_to_full: float


def default_dim(alpha: complex) -> int:
    """Truncation dimension that keeps the Poisson tail of |alpha> below ~1e-12.

    ceil(|alpha|^2 + 8|alpha| + 20); adequate for |alpha| <= 5.
    """
    a = abs(alpha)
    return int(np.ceil(a * a + 8.0 * a + 20.0))


def coherent(alpha: complex, dim: int) -> StateVector:
    """Coherent state |alpha> truncated to `dim` levels and renormalized.

    Amplitudes follow amps[n+1] = amps[n] * alpha / sqrt(n+1) (no explicit
    factorials, stable for any level count), then the truncated vector is
    renormalized to unit norm.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    alpha = complex(alpha)
    if not (np.isfinite(alpha.real) and np.isfinite(alpha.imag)):
        raise ValueError("alpha must be finite")
    amps = np.zeros(dim, dtype=complex)
    amps[0] = 1.0
    for n in range(dim - 1):
        amps[n + 1] = amps[n] * alpha / np.sqrt(n + 1.0)
    amps /= np.linalg.norm(amps)
    return StateVector(amps)


def fock(n: int, dim: int) -> StateVector:
    """Number state |n> in a `dim`-level space."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if not 0 <= n < dim:
        raise ValueError(f"level n={n} outside 0..{dim - 1}")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return StateVector(amps)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> = sum_n conj(a_n) b_n."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} != {b.dim}")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 for normalized pure states."""
    return abs(inner_product(a, b)) ** 2


def truncate(s: StateVector, M: int) -> tuple[StateVector, TruncationReport]:
    """Cut the state at Fock level M (inclusive) and renormalize.

    The report's kept_probability is the population fraction below the cut;
    for a normalized source it equals the fidelity between the truncated
    state (zero-padded back) and the original.
    """
    if not 0 <= M < s.dim:
        raise ValueError(f"cutoff M={M} outside 0..{s.dim - 1}")
    total = float(np.sum(s.probabilities()))
    if total == 0.0:
        raise ValueError("cannot truncate the zero vector")
    kept = float(np.sum(s.probabilities()[: M + 1])) / total
    if kept == 0.0:
        raise ValueError(f"no population at or below level M={M}")
    out = s.amps[: M + 1] / np.linalg.norm(s.amps[: M + 1])
    return StateVector(out), TruncationReport(M=M, kept_probability=kept, fidelity_to_full=kept)


def quadrature_moments(s: StateVector) -> tuple[float, float, float, float]:
    """Means and variances of X1 = a + a^dag and X2 = -i(a - a^dag).

    Uses the tridiagonal ladder action in the Fock basis:
      <a>   = sum_n conj(c_n) sqrt(n+1) c_{n+1}
      <a^2> = sum_n conj(c_n) sqrt((n+1)(n+2)) c_{n+2}
    Vacuum variance is 1 in this normalization.

    Returns (mean_x1, mean_x2, var_x1, var_x2).
    """
    c = s.amps
    n = np.arange(s.dim)
    ea = complex(np.sum(np.conj(c[:-1]) * np.sqrt(n[1:]) * c[1:])) if s.dim > 1 else 0j
    ea2 = (
        complex(np.sum(np.conj(c[:-2]) * np.sqrt(n[2:] * (n[2:] - 1.0)) * c[2:]))
        if s.dim > 2
        else 0j
    )
    en = float(np.sum(n * np.abs(c) ** 2))
    mean_x1 = 2.0 * ea.real
    mean_x2 = 2.0 * ea.imag
    var_x1 = 2.0 * ea2.real + 2.0 * en + 1.0 - mean_x1**2
    var_x2 = -2.0 * ea2.real + 2.0 * en + 1.0 - mean_x2**2
    return mean_x1, mean_x2, var_x1, var_x2


def parity_expectation(s: StateVector) -> float:
    """sum_n (-1)^n |c_n|^2, in [-1, 1]."""
    signs = np.where(np.arange(s.dim) % 2 == 0, 1.0, -1.0)
    return float(np.sum(signs * s.probabilities()))


# ---------------------------------------------------------------------------
# serialization: {"dim": D, "amps": [[re, im], ...]}
# ---------------------------------------------------------------------------

def state_to_json(s: StateVector) -> str:
    doc = {"dim": s.dim, "amps": [[float(a.real), float(a.imag)] for a in s.amps]}
    return json.dumps(doc, separators=(",", ": "), indent=1) + "\n"


def state_from_json(text: str) -> StateVector:
    """Parse a state document.  Validates shape and finiteness; never renormalizes."""
    doc = json.loads(text)
    if not isinstance(doc, dict) or "dim" not in doc or "amps" not in doc:
        raise ValueError("state document must contain 'dim' and 'amps'")
    dim = doc["dim"]
    amps = doc["amps"]
    if not isinstance(dim, int) or dim < 1:
        raise ValueError(f"invalid dim: {dim!r}")
    if len(amps) != dim:
        raise ValueError(f"amps length {len(amps)} does not match dim {dim}")
    arr = np.array([complex(re, im) for re, im in amps], dtype=complex)
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError("amps must be finite")
    return StateVector(arr)


def save_state(s: StateVector, path) -> None:
    with open(path, "w") as fh:
        fh.write(state_to_json(s))


def load_state(path) -> StateVector:
    with open(path) as fh:
        return state_from_json(fh.read())
