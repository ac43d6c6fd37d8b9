"""Wigner evaluators: convention pinning, dual-method agreement, diagnostics."""

from math import pi

import mpmath as mp
import numpy as np
import pytest
from scipy.integrate import quad

from kerrcat.fock import StateVector, coherent, default_dim, fock, parity_expectation
from kerrcat.kerr import KerrParams, kerr_evolve
from kerrcat.wigner import (
    SeriesConvergenceError,
    grid_to_csv,
    grid_to_gnuplot,
    grid_to_json,
    kerr_series_grid,
    negativity_volume,
    wigner_fock,
    wigner_grid,
    wigner_kerr_series,
)

from conftest import random_state


def wigner_displaced_parity_mp(amps, gamma, dps=60, weight_cut=1e-30):
    """High-precision oracle: explicit Cahill matrix elements, exact Laguerre sums."""
    mp.mp.dps = dps
    dim = len(amps)
    beta = 2 * mp.mpc(gamma.real, gamma.imag)
    x = (beta * mp.conj(beta)).real

    def lag(n, k, arg):
        acc = mp.mpf(0)
        for i in range(n + 1):
            acc += (-1) ** i * mp.binomial(n + k, n - i) * arg**i / mp.factorial(i)
        return acc

    total = mp.mpc(0)
    for n in range(dim):
        for m in range(dim):
            w = abs(amps[n]) * abs(amps[m])
            if w < weight_cut:
                continue
            cn = mp.mpc(amps[n].real, -amps[n].imag)
            cm = mp.mpc(amps[m].real, amps[m].imag)
            if n >= m:
                el = (
                    mp.sqrt(mp.factorial(m) / mp.factorial(n))
                    * beta ** (n - m)
                    * mp.e ** (-x / 2)
                    * lag(m, n - m, x)
                )
            else:
                el = (
                    mp.sqrt(mp.factorial(n) / mp.factorial(m))
                    * (-mp.conj(beta)) ** (m - n)
                    * mp.e ** (-x / 2)
                    * lag(n, m - n, x)
                )
            total += cn * cm * (-1) ** m * el
    return float((2 / mp.pi * total).real)


class TestConventionPinning:
    def test_coherent_gaussian(self):
        # |alpha> must give W(gamma) = (2/pi) e^{-2|gamma-alpha|^2}: peak at
        # gamma = alpha, height 2/pi.  This pins the gamma scaling globally.
        s = coherent(2.0, 40)
        for g in (0j, 1.0 + 0.5j, 2.0 + 0j, -1.0 + 2.0j, 3.5 + 3.5j):
            expected = (2 / pi) * np.exp(-2 * abs(g - 2.0) ** 2)
            assert wigner_fock(s, g) == pytest.approx(expected, abs=1e-13)

    def test_series_matches_same_convention(self):
        p = KerrParams(2.0, 0.0)
        for g in (0j, 1.0 + 0.5j, -1.0 + 2.0j):
            expected = (2 / pi) * np.exp(-2 * abs(g - 2.0) ** 2)
            assert wigner_kerr_series(p, g) == pytest.approx(expected, abs=1e-13)

    def test_vacuum_peak(self):
        assert wigner_fock(coherent(0.0, 10), 0j) == pytest.approx(2 / pi, abs=1e-14)

    def test_fock_one_at_origin(self):
        assert wigner_fock(fock(1, 10), 0j) == pytest.approx(-2 / pi, abs=1e-14)

    def test_rotational_covariance(self):
        for phi in (0.4, 1.9):
            base = coherent(1.5, 35)
            rot = coherent(1.5 * np.exp(1j * phi), 35)
            for g in (0.7 + 0.2j, -1.0 + 1.0j, 2.0 + 0j):
                w_base = wigner_fock(base, g)
                w_rot = wigner_fock(rot, g * np.exp(1j * phi))
                assert w_rot == pytest.approx(w_base, abs=1e-9)


class TestParityIdentity:
    def test_random_states(self, rng):
        # W(0) = (2/pi) sum (-1)^n |c_n|^2 for any state
        for _ in range(20):
            s = StateVector(random_state(rng, int(rng.integers(2, 40))))
            assert wigner_fock(s, 0j) == pytest.approx(
                (2 / pi) * parity_expectation(s), abs=1e-10
            )

    def test_series_at_origin(self):
        p = KerrParams(2.0, pi / 2)
        s = kerr_evolve(p, default_dim(2.0))
        assert wigner_kerr_series(p, 0j) == pytest.approx(
            (2 / pi) * parity_expectation(s), abs=1e-8
        )


class TestHighPrecisionOracle:
    def test_kerr_state_points(self):
        amps = kerr_evolve(KerrParams(2.0, pi / 2), 40).amps
        for g in (0.5 + 0.3j, 2.0 + 0j, -1.5 - 2.5j, 3.5 + 3.5j):
            want = wigner_displaced_parity_mp(amps, complex(g))
            assert wigner_fock(StateVector(amps), g) == pytest.approx(want, abs=1e-13)
            assert wigner_kerr_series(KerrParams(2.0, pi / 2), g) == pytest.approx(
                want, abs=1e-9
            )

    def test_large_alpha_window_corner(self):
        # the recurrence must stay accurate where naive prefactor*polynomial
        # evaluation overflows: |2 gamma| ~ 17, dim = 85
        amps = kerr_evolve(KerrParams(5.0, 0.08), 85).amps
        s = StateVector(amps)
        for g in (5.0 + 0j, -3.0 + 4.0j):
            want = wigner_displaced_parity_mp(amps, complex(g), weight_cut=1e-20)
            assert wigner_fock(s, g) == pytest.approx(want, abs=1e-12)


class TestSeries:
    def test_vacuum_gaussian(self):
        # alpha=0: only the q=k=0 term survives
        assert wigner_kerr_series(KerrParams(0.0, 0.7), 1.0 + 0j) == pytest.approx(
            (2 / pi) * np.exp(-2.0), abs=1e-14
        )

    def test_dual_method_grids(self):
        xs = np.linspace(-3.5, 3.5, 21)
        pts = (xs[None, :] + 1j * xs[:, None]).ravel()
        for alpha in (1.0, 2.0):
            for tau in (0.01, 0.08, pi / 3, 2 * pi / 5, pi / 2, 2 * pi / 3, pi):
                p = KerrParams(alpha, tau)
                s = kerr_evolve(p, default_dim(alpha))
                w_fock = wigner_fock(s, pts)
                w_series = np.array([wigner_kerr_series(p, g) for g in pts])
                assert np.max(np.abs(w_fock - w_series)) < 1e-7

    def test_termination_cap_raises(self):
        with pytest.raises(SeriesConvergenceError):
            wigner_kerr_series(KerrParams(2.0, 0.3), 3.0 + 1j, max_terms=8)

    def test_rejects_bad_tol(self):
        with pytest.raises(ValueError):
            wigner_kerr_series(KerrParams(1.0, 0.1), 0j, tol=0.0)


class TestGrid:
    def test_vacuum_integral(self):
        g = wigner_grid(coherent(0.0, 8), window=(-3, 3, -3, 3), nx=61, ny=61)
        assert g.integral() == pytest.approx(1.0, abs=1e-3)
        assert g.values.min() >= -1e-9

    def test_coherent_positive_peak_location(self):
        s = coherent(2.0, default_dim(2.0))
        g = wigner_grid(s, window=(-5.5, 5.5, -5.5, 5.5), nx=111, ny=111)
        assert g.values.min() >= -1e-9
        j, i = np.unravel_index(np.argmax(g.values), g.values.shape)
        assert abs(g.xs()[i] - 2.0) < 0.1
        assert abs(g.ys()[j]) < 0.1

    def test_six_lobes_at_pi_over_3(self):
        # the tau = pi/3 collapse puts six coherent lobes at the published
        # angles; midway angles on the same circle sit in interference dips
        s = kerr_evolve(KerrParams(2.0, pi / 3), default_dim(2.0))
        lobe_angles = (pi / 6, pi / 2, 5 * pi / 6, 7 * pi / 6, 3 * pi / 2, 11 * pi / 6)
        midway_angles = (0.0, pi / 3, 2 * pi / 3, pi, 4 * pi / 3, 5 * pi / 3)
        lobes = [wigner_fock(s, 2.0 * np.exp(1j * a)) for a in lobe_angles]
        midway = [wigner_fock(s, 2.0 * np.exp(1j * a)) for a in midway_angles]
        assert min(lobes) > 0.03
        assert np.mean(lobes) > np.mean(midway) + 0.05

    def test_row_ordering(self):
        g = wigner_grid(coherent(0.0, 4), window=(-1, 1, -1, 1), nx=3, ny=2)
        rows = list(g.rows())
        ys = [r[1] for r in rows]
        xs = [r[0] for r in rows]
        assert ys == sorted(ys)
        assert xs[:3] == sorted(xs[:3]) and ys[0] == ys[1] == ys[2]

    def test_bound_invariant(self):
        for tau in (0.08, pi / 2, pi):
            s = kerr_evolve(KerrParams(2.0, tau), default_dim(2.0))
            g = wigner_grid(s, nx=61, ny=61)
            assert g.values.min() >= -2 / pi - 1e-9
            assert g.values.max() <= 2 / pi + 1e-9

    def test_degenerate_window_rejected(self):
        with pytest.raises(ValueError):
            wigner_grid(coherent(0.0, 4), window=(1, 1, -1, 1), nx=5, ny=5)
        with pytest.raises(ValueError):
            wigner_grid(coherent(0.0, 4), window=(-1, 1, -1, 1), nx=1, ny=5)

    def test_auto_window_covers_state(self):
        s = coherent(3.0, default_dim(3.0))
        g = wigner_grid(s, nx=81, ny=81)
        assert g.x_max >= 6.0
        assert g.integral() == pytest.approx(1.0, abs=5e-3)

    def test_deterministic(self):
        s = kerr_evolve(KerrParams(1.0, 0.4), 30)
        a = wigner_grid(s, window=(-3, 3, -3, 3), nx=21, ny=21)
        b = wigner_grid(s, window=(-3, 3, -3, 3), nx=21, ny=21)
        assert np.array_equal(a.values, b.values)


class TestNegativity:
    def test_vacuum_zero(self):
        g = wigner_grid(coherent(0.0, 8), window=(-4, 4, -4, 4), nx=81, ny=81)
        assert negativity_volume(g) < 1e-6

    def test_coherent_zero(self):
        g = wigner_grid(coherent(2.0, 40), window=(-6, 6, -6, 6), nx=101, ny=101)
        assert negativity_volume(g) < 1e-6

    def test_fock_one_against_radial_oracle(self):
        # W_{|1>}(gamma) = (2/pi)(4 r^2 - 1) e^{-2 r^2}: integrate the negative
        # disk radially, independent of the grid path
        oracle, err = quad(
            lambda r: (2 / pi) * max(1.0 - 4 * r * r, 0.0) * np.exp(-2 * r * r) * 2 * pi * r,
            0.0,
            0.5,
        )
        assert err < 1e-12
        assert oracle == pytest.approx(2 * np.exp(-0.5) - 1.0, abs=1e-12)
        g = wigner_grid(fock(1, 12), window=(-4, 4, -4, 4), nx=121, ny=121)
        assert negativity_volume(g) == pytest.approx(oracle, abs=1e-3)

    def test_cat_negativity_positive(self):
        s = kerr_evolve(KerrParams(2.0, pi), default_dim(2.0))
        g = wigner_grid(s, nx=101, ny=101)
        assert negativity_volume(g) > 0.1

    def test_precondition_enforced(self):
        # window far too small: integral nowhere near 1
        g = wigner_grid(coherent(3.0, 60), window=(-1, 1, -1, 1), nx=21, ny=21)
        with pytest.raises(ValueError):
            negativity_volume(g)


class TestEmitters:
    @pytest.fixture
    def grid(self):
        return wigner_grid(coherent(1.0, 25), window=(-2, 2, -2, 2), nx=4, ny=3)

    def test_csv_shape_and_roundtrip(self, grid):
        text = grid_to_csv(grid, {"integral": grid.integral()})
        lines = text.strip().splitlines()
        comments = [l for l in lines if l.startswith("#")]
        assert len(comments) == 4  # window, resolution, method, integral
        assert lines[len(comments)] == "x,y,w"
        data = lines[len(comments) + 1 :]
        assert len(data) == 12
        x, y, w = data[0].split(",")
        assert float(w) == grid.values[0, 0]  # 17 digits round-trip exactly

    def test_gnuplot_matrix(self, grid):
        text = grid_to_gnuplot(grid)
        lines = text.strip().splitlines()
        assert lines[0].startswith("# window:")
        assert lines[1].startswith("# resolution:")
        assert lines[2].startswith("# method: fock-parity")
        data = lines[3:]
        assert len(data) == 3
        assert all(len(row.split()) == 4 for row in data)

    def test_json_metadata_and_values(self, grid):
        import json as _json

        doc = _json.loads(grid_to_json(grid, {"integral": grid.integral()}))
        assert doc["nx"] == 4 and doc["ny"] == 3
        assert doc["method"] == "fock-parity"
        vals = np.array(doc["values"])
        assert vals.shape == (3, 4)
        assert np.array_equal(vals, grid.values)

    def test_series_grid_method_tag(self):
        g = kerr_series_grid(KerrParams(1.0, 0.3), (-2, 2, -2, 2), 5, 5)
        assert g.method == "kerr-series"
        assert "method: kerr-series" in grid_to_csv(g)
