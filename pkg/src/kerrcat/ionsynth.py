"""Carrier/red-sideband pulse dynamics and schedule synthesis for a trapped ion.

The joint state lives on (motional level n, electronic level g/e).  A carrier
pulse rotates every (|n,g>, |n,e>) pair; a red-sideband pulse rotates every
(|n,g>, |n-1,e>) pair.  Both use the resonant two-level rotation

    g' =  cos(th/2) g - i e^{-i phi} sin(th/2) e
    e' = -i e^{i phi} sin(th/2) g + cos(th/2) e

where th is the pair's effective angle: the pulse angle scaled by the exact
displacement matrix element of that transition (valid beyond the Lamb-Dicke
regime):

    carrier  pair n:  L_c(n)  = e^{-eta^2/2} L_n(eta^2)
    sideband pair n:  L_r(n)  = eta e^{-eta^2/2} L^1_{n-1}(eta^2) / sqrt(n)

A Pulse stores theta as the effective angle on its own target transition
(index k), so theta always lies in [0, 2pi); the simulator rescales it by
L(k) to recover the bare drive angle shared by all pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi

import json
import numpy as np
from scipy.special import eval_genlaguerre, eval_laguerre

from .fock import StateVector

__all__ = [
    "JointState",
    "Pulse",
    "TargetSpec",
    "PhysicalSchedule",
    "SynthesisResult",
    "CARRIER",
    "RED_SIDEBAND",
    "carrier_reduction",
    "red_reduction",
    "apply_carrier",
    "apply_red_sideband",
    "synthesize",
    "to_physical",
    "simulate_schedule",
    "schedule_to_json",
    "schedule_from_json",
    "schedule_table",
]

CARRIER = "carrier"
RED_SIDEBAND = "red-sideband"

AMP_EPS = 1e-12  # amplitudes below this count as already nulled


class JointState:
    """Immutable state over (motional level, electronic g/e) pairs."""

    __slots__ = ("_g", "_e")

    def __init__(self, amps_g, amps_e):
        g = np.asarray(amps_g, dtype=complex)
        e = np.asarray(amps_e, dtype=complex)
        if g.shape != e.shape or g.ndim != 1 or g.size < 1:
            raise ValueError("amps_g and amps_e must be equal-length 1-D sequences")
        if not (
            np.all(np.isfinite(g.real))
            and np.all(np.isfinite(g.imag))
            and np.all(np.isfinite(e.real))
            and np.all(np.isfinite(e.imag))
        ):
            raise ValueError("joint amplitudes must be finite")
        g.setflags(write=False)
        e.setflags(write=False)
        self._g = g
        self._e = e

    @classmethod
    def ground(cls, dim: int) -> "JointState":
        """|0, g> in a dim-level motional space."""
        g = np.zeros(dim, dtype=complex)
        g[0] = 1.0
        return cls(g, np.zeros(dim, dtype=complex))

    @classmethod
    def from_motional(cls, s: StateVector) -> "JointState":
        """Motional state in the electronic ground manifold."""
        return cls(s.amps.copy(), np.zeros(s.dim, dtype=complex))

    @property
    def amps_g(self) -> np.ndarray:
        return self._g

    @property
    def amps_e(self) -> np.ndarray:
        return self._e

    @property
    def dim(self) -> int:
        return self._g.size

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self._g) ** 2 + np.abs(self._e) ** 2)))

    def excited_population(self) -> float:
        return float(np.sum(np.abs(self._e) ** 2))

    def motional_ground_part(self) -> StateVector:
        """The g-manifold amplitudes as a plain state (not renormalized)."""
        return StateVector(self._g.copy())

    def __repr__(self) -> str:
        return f"JointState(dim={self.dim}, norm={self.norm():.6f})"


@dataclass(frozen=True)
class Pulse:
    """One laser pulse; theta is the effective angle on its target transition."""

    kind: str
    index: int
    phase: float
    theta: float

    def __post_init__(self):
        if self.kind not in (CARRIER, RED_SIDEBAND):
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if not 0.0 <= self.theta < 2.0 * pi:
            raise ValueError(f"theta {self.theta} outside [0, 2pi)")
        if not -2.0 * pi < self.phase <= 2.0 * pi:
            raise ValueError(f"phase {self.phase} outside (-2pi, 2pi]")
        if self.index < 0:
            raise ValueError("index must be non-negative")
        if self.kind == RED_SIDEBAND and self.index < 1:
            raise ValueError("red-sideband index must be >= 1")

    @property
    def label(self) -> str:
        return ("C" if self.kind == CARRIER else "R") + str(self.index)


@dataclass(frozen=True)
class TargetSpec:
    """Normalized motional target sum_n coeffs[n] |n, g> plus phase bookkeeping."""

    coeffs: tuple
    global_phase: complex = 1.0 + 0.0j

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coeffs must be a non-empty 1-D sequence")
        if abs(np.sum(np.abs(c) ** 2) - 1.0) > 1e-12:
            raise ValueError("target coefficients must be normalized to 1 within 1e-12")
        if abs(abs(complex(self.global_phase)) - 1.0) > 1e-12:
            raise ValueError("global_phase must have unit magnitude")

    @classmethod
    def from_state(cls, s: StateVector) -> "TargetSpec":
        return cls(tuple(complex(a) for a in s.normalized().amps))

    def top_index(self) -> int:
        """Highest index with |c_n| > 1e-12; -1 when all coefficients vanish."""
        mags = np.abs(np.asarray(self.coeffs))
        idx = np.nonzero(mags > AMP_EPS)[0]
        return int(idx[-1]) if idx.size else -1


@dataclass(frozen=True)
class SynthesisResult:
    """Pulse list in application order plus the achieved phase bookkeeping.

    Starting the schedule from global_phase * |0,g> reproduces the target
    exactly; starting from plain |0,g> reproduces it up to conj(global_phase).
    """

    pulses: tuple
    global_phase: complex


@dataclass(frozen=True)
class PhysicalSchedule:
    """Pulses with a physical parametrization attached.

    mode "fixed-rabi": per_pulse holds durations (s) at the two fixed Rabi
    frequencies.  mode "fixed-duration": per_pulse holds per-pulse Rabi
    frequencies (rad/s) at the common duration.  Pulse area is
    theta = rabi * reduction * duration / convention_factor either way.
    """

    pulses: tuple
    mode: str
    eta: float
    carrier_rabi: float = 0.0
    red_rabi: float = 0.0
    fixed_duration: float = 0.0
    convention_factor: int = 1
    per_pulse: tuple = field(default_factory=tuple)
    global_phase: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.mode not in ("fixed-rabi", "fixed-duration"):
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        if self.convention_factor not in (1, 2):
            raise ValueError("convention_factor must be 1 or 2")
        if len(self.per_pulse) != len(self.pulses):
            raise ValueError("per_pulse must align with pulses")
        if self.mode == "fixed-rabi" and (self.carrier_rabi <= 0 or self.red_rabi <= 0):
            raise ValueError("fixed-rabi mode requires positive carrier_rabi and red_rabi")
        if self.mode == "fixed-duration" and self.fixed_duration <= 0:
            raise ValueError("fixed-duration mode requires a positive fixed_duration")
        for pulse, value in zip(self.pulses, self.per_pulse):
            if pulse.theta > 0 and value <= 0:
                raise ValueError(f"pulse {pulse.label} has non-positive physical value")


def carrier_reduction(n, eta: float):
    """Effective-angle factor of the carrier on motional level n."""
    return np.exp(-eta * eta / 2.0) * eval_laguerre(n, eta * eta)


def red_reduction(n, eta: float):
    """Effective-angle factor of the red sideband on the (n, n-1) transition.

    Exact matrix element magnitude |<n-1|e^{i eta (a + a^dag)}|n>|; reduces to
    the Lamb-Dicke eta*sqrt(n) law as eta -> 0.
    """
    n = np.asarray(n)
    if np.any(n < 1):
        raise ValueError("red sideband needs n >= 1")
    return eta * np.exp(-eta * eta / 2.0) * eval_genlaguerre(n - 1, 1, eta * eta) / np.sqrt(n)


def _rotate(pair_g, pair_e, phase: float, thetas):
    """Two-level rotation on paired (g-slot, e-slot) amplitude arrays."""
    c = np.cos(thetas / 2.0)
    s = np.sin(thetas / 2.0)
    new_g = c * pair_g - 1j * np.exp(-1j * phase) * s * pair_e
    new_e = -1j * np.exp(1j * phase) * s * pair_g + c * pair_e
    return new_g, new_e


def apply_carrier(state: JointState, phase: float, theta: float, eta: float) -> JointState:
    """Rotate every (|n,g>, |n,e>) pair by theta * L_c(n, eta)."""
    n = np.arange(state.dim)
    thetas = theta * carrier_reduction(n, eta)
    g, e = _rotate(state.amps_g, state.amps_e, phase, thetas)
    return JointState(g, e)


def apply_red_sideband(state: JointState, phase: float, theta: float, eta: float) -> JointState:
    """Rotate every (|n,g>, |n-1,e>) pair by theta * L_r(n, eta).

    |0,g> has no partner and is untouched, as is the top |dim-1, e> level.
    """
    if eta <= 0:
        raise ValueError("red sideband requires eta > 0")
    if state.dim < 2:
        return state
    n = np.arange(1, state.dim)
    thetas = theta * red_reduction(n, eta)
    g_hi, e_lo = _rotate(state.amps_g[1:], state.amps_e[:-1], phase, thetas)
    g = state.amps_g.copy()
    e = state.amps_e.copy()
    g[1:] = g_hi
    e[:-1] = e_lo
    return JointState(g, e)


def _wrap_phase(phi: float) -> float:
    w = (phi + pi) % (2.0 * pi) - pi
    return pi if w <= -pi else w


def _null_red(x: complex, y: complex) -> tuple[float, float]:
    """Effective (theta, phase) sending the pair (g=x, e=y) to (0, *)."""
    if abs(x) < AMP_EPS:
        return 0.0, 0.0
    phase = float(np.angle(y) + pi / 2.0 - np.angle(x))
    theta = 2.0 * float(np.arctan2(abs(x), abs(y)))
    return theta, _wrap_phase(phase)


def _null_carrier(x: complex, y: complex) -> tuple[float, float]:
    """Effective (theta, phase) sending the pair (g=y, e=x) to (*, 0)."""
    if abs(x) < AMP_EPS:
        return 0.0, 0.0
    phase = float(np.angle(x) - np.angle(y) - pi / 2.0)
    theta = 2.0 * float(np.arctan2(abs(x), abs(y)))
    return theta, _wrap_phase(phase)


def synthesize(target: TargetSpec, eta: float) -> SynthesisResult:
    """Build the 2M-pulse schedule C0 R1 C1 ... C_{M-1} R_M preparing the target.

    Deconstruction: walk the target down from level M, using a red-sideband
    rotation to empty |k,g> into |k-1,e> and a carrier rotation to merge
    |k-1,e> into |k-1,g>, then invert and reverse the recorded rotations.
    Already-empty amplitudes yield identity pulses, keeping the pulse count
    at exactly 2M.
    """
    if eta <= 0:
        raise ValueError("synthesis requires eta > 0")
    M = target.top_index()
    if M < 0:
        raise ValueError("target has no support: all coefficients are below 1e-12")
    if M == 0:
        phase = complex(target.global_phase) * complex(target.coeffs[0])
        return SynthesisResult(pulses=(), global_phase=phase / abs(phase))

    dim = M + 6  # guard levels let the simulator detect leakage instead of hiding it
    g = np.zeros(dim, dtype=complex)
    g[: M + 1] = complex(target.global_phase) * np.asarray(
        target.coeffs[: M + 1], dtype=complex
    )
    state = JointState(g, np.zeros(dim, dtype=complex))

    recorded: list[Pulse] = []
    for k in range(M, 0, -1):
        theta, phase = _null_red(state.amps_g[k], state.amps_e[k - 1])
        reduction = float(red_reduction(k, eta))
        if reduction <= 0:
            raise ArithmeticError(f"red-sideband reduction vanishes at n={k}, eta={eta}")
        state = apply_red_sideband(state, phase, theta / reduction, eta)
        recorded.append(Pulse(RED_SIDEBAND, k, phase, theta))

        theta, phase = _null_carrier(state.amps_e[k - 1], state.amps_g[k - 1])
        reduction = float(carrier_reduction(k - 1, eta))
        if reduction <= 0:
            raise ArithmeticError(f"carrier reduction vanishes at n={k - 1}, eta={eta}")
        state = apply_carrier(state, phase, theta / reduction, eta)
        recorded.append(Pulse(CARRIER, k - 1, phase, theta))

    nu = complex(state.amps_g[0])
    # inverse of U(theta, phi) is U(theta, phi + pi); reversing the recorded
    # deconstruction yields the forward schedule
    forward = tuple(
        Pulse(pl.kind, pl.index, _wrap_phase(pl.phase + pi), pl.theta)
        for pl in reversed(recorded)
    )
    return SynthesisResult(pulses=forward, global_phase=nu / abs(nu))


def _reduction_for(pulse: Pulse, eta: float) -> float:
    if pulse.kind == CARRIER:
        return float(carrier_reduction(pulse.index, eta))
    return float(red_reduction(pulse.index, eta))


def to_physical(
    pulses,
    mode: str,
    carrier_rabi: float = 0.0,
    red_rabi: float = 0.0,
    fixed_duration: float = 0.0,
    eta: float = 0.02,
    convention_factor: int = 1,
    global_phase: complex = 1.0 + 0.0j,
) -> PhysicalSchedule:
    """Attach durations (fixed-rabi) or per-pulse Rabi frequencies (fixed-duration).

    Rabi frequencies are angular (rad/s).  theta = rabi * reduction * t /
    convention_factor, so doubling the Rabi frequency halves the duration.
    Zero-theta pulses get a zero physical value and are marked skippable in
    the serialized form.
    """
    pulses = tuple(pulses)
    per = []
    for pl in pulses:
        red = _reduction_for(pl, eta)
        if red <= 0:
            raise ArithmeticError(f"reduction factor vanishes for pulse {pl.label}")
        if mode == "fixed-rabi":
            rabi = carrier_rabi if pl.kind == CARRIER else red_rabi
            if rabi <= 0:
                raise ValueError("fixed-rabi mode requires positive Rabi frequencies")
            per.append(convention_factor * pl.theta / (rabi * red))
        elif mode == "fixed-duration":
            if fixed_duration <= 0:
                raise ValueError("fixed-duration mode requires a positive duration")
            per.append(convention_factor * pl.theta / (fixed_duration * red))
        else:
            raise ValueError(f"unknown schedule mode {mode!r}")
    return PhysicalSchedule(
        pulses=pulses,
        mode=mode,
        eta=eta,
        carrier_rabi=carrier_rabi,
        red_rabi=red_rabi,
        fixed_duration=fixed_duration,
        convention_factor=convention_factor,
        per_pulse=tuple(per),
        global_phase=complex(global_phase),
    )


def _effective_theta(sched: PhysicalSchedule, i: int) -> float:
    pl = sched.pulses[i]
    red = _reduction_for(pl, sched.eta)
    if sched.mode == "fixed-rabi":
        rabi = sched.carrier_rabi if pl.kind == CARRIER else sched.red_rabi
        return sched.per_pulse[i] * rabi * red / sched.convention_factor
    return sched.per_pulse[i] * sched.fixed_duration * red / sched.convention_factor


def simulate_schedule(schedule, initial: JointState | None = None, eta: float | None = None) -> JointState:
    """Apply a pulse list or PhysicalSchedule in order; returns the final state.

    For a PhysicalSchedule the effective angles are recomputed from the
    physical parametrization, so fixed-rabi and fixed-duration forms of the
    same schedule are checked to be genuinely interchangeable.
    """
    if isinstance(schedule, PhysicalSchedule):
        pulses = schedule.pulses
        eta = schedule.eta
        thetas = [_effective_theta(schedule, i) for i in range(len(pulses))]
    else:
        pulses = tuple(schedule)
        if eta is None:
            raise ValueError("eta is required when simulating a bare pulse list")
        thetas = [pl.theta for pl in pulses]

    max_index = max((pl.index for pl in pulses), default=0)
    if initial is None:
        initial = JointState.ground(max_index + 6)
    if initial.dim < max_index + 2:
        raise ValueError(
            f"joint dimension {initial.dim} cannot hold the schedule; need >= {max_index + 2}"
        )

    state = initial
    for pl, theta in zip(pulses, thetas):
        if theta == 0.0:
            continue
        reduction = _reduction_for(pl, eta)
        bare = theta / reduction
        if pl.kind == CARRIER:
            state = apply_carrier(state, pl.phase, bare, eta)
        else:
            state = apply_red_sideband(state, pl.phase, bare, eta)
    return state


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def schedule_to_json(sched: PhysicalSchedule) -> str:
    header = {
        "mode": sched.mode,
        "eta": sched.eta,
        "carrier_rabi_hz": sched.carrier_rabi,
        "red_rabi_hz": sched.red_rabi,
        "fixed_duration_s": sched.fixed_duration,
        "convention_factor": sched.convention_factor,
        "global_phase": [sched.global_phase.real, sched.global_phase.imag],
    }
    rows = []
    for i, pl in enumerate(sched.pulses):
        row = {
            "kind": pl.kind,
            "index": pl.index,
            "phase_rad": pl.phase,
            "theta_rad": pl.theta,
        }
        if sched.mode == "fixed-rabi":
            row["duration_s"] = sched.per_pulse[i]
        else:
            row["rabi_hz"] = sched.per_pulse[i]
        if pl.theta == 0.0:
            row["skippable"] = True
        rows.append(row)
    return json.dumps({"header": header, "pulses": rows}, indent=1) + "\n"


def schedule_from_json(text: str) -> PhysicalSchedule:
    doc = json.loads(text)
    header = doc["header"]
    pulses = []
    per = []
    for row in doc["pulses"]:
        pulses.append(
            Pulse(
                kind=row["kind"],
                index=int(row["index"]),
                phase=float(row["phase_rad"]),
                theta=float(row["theta_rad"]),
            )
        )
        per.append(float(row.get("duration_s", row.get("rabi_hz", 0.0))))
    gp = header.get("global_phase", [1.0, 0.0])
    return PhysicalSchedule(
        pulses=tuple(pulses),
        mode=header["mode"],
        eta=float(header["eta"]),
        carrier_rabi=float(header.get("carrier_rabi_hz", 0.0)),
        red_rabi=float(header.get("red_rabi_hz", 0.0)),
        fixed_duration=float(header.get("fixed_duration_s", 0.0)),
        convention_factor=int(header.get("convention_factor", 1)),
        per_pulse=tuple(per),
        global_phase=complex(gp[0], gp[1]),
    )


def schedule_table(sched: PhysicalSchedule) -> str:
    """Plain-text table in the published layout: R_M first, one pulse per line."""
    lines = [
        f"# mode={sched.mode} eta={sched.eta:g} convention_factor={sched.convention_factor}",
        f"# global_phase = {sched.global_phase.real:+.4f}{sched.global_phase.imag:+.4f}i",
    ]
    for i in reversed(range(len(sched.pulses))):
        pl = sched.pulses[i]
        if sched.mode == "fixed-rabi":
            qty = f"t = {sched.per_pulse[i] * 1e6:.4g} us"
        else:
            qty = f"Omega = {sched.per_pulse[i] / 1e6:.4g} MHz"
        skip = "  (identity, skippable)" if pl.theta == 0.0 else ""
        lines.append(f"{pl.label}: phi = {pl.phase:+.4f}, {qty}{skip}")
    return "\n".join(lines) + "\n"
