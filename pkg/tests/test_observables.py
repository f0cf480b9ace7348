import math

import numpy as np
import pytest

from landaulab.observables import (
    QuadratureSpec,
    angular_velocity,
    bohmian_angular_velocity,
    bohmian_density_average,
    current_decomposition,
    density,
    expect_closed_form,
    expect_quadrature,
    expect_table,
    field_grid,
    integrate_radial,
    oam_decomposition,
    oam_grid,
)
from landaulab.states import LandauState, QuantumNumbers


def make_state(n_r, m):
    return LandauState(QuantumNumbers(n_r, m))


def bisect_root(f, lo, hi, tol=1e-12):
    """Sign-change bisection oracle, independent of any library root finder."""
    flo, fhi = f(lo), f(hi)
    assert flo * fhi < 0, "bracket must straddle a sign change"
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


class TestDensity:
    def test_ground_state_origin(self):
        state = make_state(0, 0)
        b = state.units.oscillator_length
        assert density(state, 0.0) == pytest.approx(1.0 / (math.pi * b * b), rel=1e-14)

    def test_equal_densities_for_partner_states(self):
        r = np.linspace(0.0, 12.0, 300)
        a = density(LandauState(QuantumNumbers.from_landau(10, 10)), r)
        b = density(LandauState(QuantumNumbers.from_landau(0, -10)), r)
        np.testing.assert_array_equal(a, b)

    def test_density_normalized(self):
        state = make_state(4, -6)
        spec = QuadratureSpec.for_state(state)
        total = integrate_radial(lambda r: 2.0 * math.pi * density(state, r) * r, spec)
        assert total == pytest.approx(1.0, abs=1e-10)


class TestCurrentDecomposition:
    def test_m_zero_has_no_canonical_piece(self):
        state = make_state(2, 0)
        r = np.linspace(0.0, 8.0, 50)
        cd = current_decomposition(state, r)
        np.testing.assert_array_equal(cd.j_can_phi, 0.0)
        np.testing.assert_array_equal(cd.j_total_phi, cd.j_gauge_phi)
        assert np.all(cd.j_total_phi[r > 0] > 0.0)  # counter-clockwise everywhere

    def test_positive_m_flows_counterclockwise(self):
        state = LandauState(QuantumNumbers.from_landau(10, 10))
        r = np.linspace(0.05, 12.0, 400)
        cd = current_decomposition(state, r)
        assert np.all(cd.j_can_phi > 0.0)
        assert np.all(cd.j_gauge_phi > 0.0)
        assert np.all(cd.j_total_phi > 0.0)

    def test_negative_m_zero_crossing_location(self):
        # clockwise inside, counter-clockwise outside; the sign change of the
        # total current sits at sqrt(2|m|) l_B, located here by bisection
        state = LandauState(QuantumNumbers.from_landau(0, -10))
        l_B = state.units.magnetic_length

        def j_tot(r):
            return float(current_decomposition(state, r).j_total_phi[0])

        root = bisect_root(j_tot, 1.0, 8.0)
        assert root == pytest.approx(math.sqrt(20.0) * l_B, abs=1e-9)
        assert j_tot(0.5 * root) < 0.0
        assert j_tot(1.5 * root) > 0.0

    def test_closure_is_exact(self):
        state = make_state(3, -4)
        r = np.linspace(0.0, 9.0, 101)
        cd = current_decomposition(state, r)
        np.testing.assert_array_equal(cd.j_total_phi, cd.j_can_phi + cd.j_gauge_phi)

    def test_origin_returns_zero_for_nonzero_m(self):
        cd = current_decomposition(make_state(0, 5), 0.0)
        assert cd.j_can_phi[0] == 0.0
        assert cd.j_total_phi[0] == 0.0


class TestOAMDecomposition:
    def test_m_zero_canonical_density_vanishes(self):
        od = oam_decomposition(make_state(1, 0), np.linspace(0, 6, 20))
        np.testing.assert_array_equal(od.l_can, 0.0)

    def test_gauge_density_ratio(self):
        state = make_state(2, 3)
        r = np.linspace(0.1, 8.0, 60)
        od = oam_decomposition(state, r)
        rho = density(state, r)
        lb2 = state.units.magnetic_length**2
        np.testing.assert_allclose(od.l_gauge / rho, r**2 / (2 * lb2), rtol=1e-12)
        assert np.all(od.l_gauge >= 0.0)

    def test_mechanical_density_equals_r_cross_current(self):
        # l_mech = m_e r j_total_phi pointwise
        for n_r, m in [(0, 4), (2, -7), (5, 0)]:
            state = make_state(n_r, m)
            r = np.linspace(0.0, 10.0, 200)
            od = oam_decomposition(state, r)
            cd = current_decomposition(state, r)
            np.testing.assert_allclose(od.l_mech, state.units.mass * r * cd.j_total_phi,
                                       rtol=0, atol=1e-12 * np.max(np.abs(od.l_mech)))

    def test_pot_is_minus_gauge(self):
        od = oam_decomposition(make_state(1, 2), np.linspace(0, 5, 11))
        np.testing.assert_array_equal(od.l_pot, -od.l_gauge)


class TestExpectations:
    def test_closed_form_reference_states(self):
        lb2 = 1.0
        table = expect_closed_form(LandauState(QuantumNumbers.from_landau(10, 10)))
        assert table["rc2"] == pytest.approx(21.0 * lb2)
        assert table["R2"] == pytest.approx(1.0 * lb2)
        table = expect_closed_form(LandauState(QuantumNumbers.from_landau(0, -10)))
        assert table["rc2"] == pytest.approx(1.0 * lb2)
        assert table["R2"] == pytest.approx(21.0 * lb2)

    def test_mech_is_sum_of_parts(self):
        for n_r, m in [(0, 3), (4, -5), (2, 0)]:
            t = expect_closed_form(make_state(n_r, m))
            assert t["l_mech"] == t["l_can"] + t["l_gauge"]
            assert t["l_pot"] == -t["l_gauge"]
            assert t["l_mech"] == 2 * make_state(n_r, m).landau_index + 1

    def test_quadrature_norm(self):
        assert expect_quadrature(make_state(5, -3), "norm") == pytest.approx(1.0, abs=1e-10)

    def test_quadrature_inv_r2(self):
        for n_r, m in [(0, 3), (2, -6), (1, 1)]:
            state = make_state(n_r, m)
            lb2 = state.units.magnetic_length**2
            got = expect_quadrature(state, "inv_r2")
            assert got == pytest.approx(1.0 / (2.0 * lb2 * abs(m)), rel=1e-8)

    def test_quadrature_inv_r2_rejects_m_zero(self):
        with pytest.raises(ValueError):
            expect_quadrature(make_state(1, 0), "inv_r2")

    def test_quadrature_l_mech_example(self):
        state = LandauState(QuantumNumbers.from_landau(7, -3))
        assert expect_quadrature(state, "l_mech") == pytest.approx(15.0, rel=1e-8)

    def test_table_agreement_sample(self):
        for n_r, m in [(0, 0), (3, 7), (6, -6), (15, 15), (15, -15)]:
            rows = expect_table(make_state(n_r, m))
            for name, row in rows.items():
                assert row["rel_err"] <= 1e-8, (n_r, m, name, row)

    def test_gl_and_simpson_schemes_agree(self):
        state = make_state(4, 5)
        a = expect_quadrature(state, "r2", QuadratureSpec.for_state(state, "adaptive-simpson"))
        b = expect_quadrature(state, "r2",
                              QuadratureSpec.for_state(state, "gauss-legendre-mapped", n_points=96))
        assert a == pytest.approx(b, rel=1e-10)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            expect_quadrature(make_state(0, 1), "bogus")


class TestAngularVelocity:
    @pytest.mark.parametrize("m,expected", [(-7, 0.0), (0, 0.5), (4, 1.0)])
    def test_three_classes(self, m, expected):
        state = make_state(0 if m != 0 else 1, m)
        av = angular_velocity(state)
        assert av.total == expected  # exact: {0, omega_L, omega_c}

    def test_split_structure(self):
        u = make_state(0, 3).units
        av = angular_velocity(make_state(0, 3))
        assert av.gauge == u.larmor
        assert av.canonical == u.larmor
        av = angular_velocity(make_state(1, 0))
        assert av.canonical == 0.0
        av = angular_velocity(make_state(0, -2))
        assert av.canonical == -u.larmor
        assert av.total == 0.0

    def test_bohmian_field_and_average(self):
        state = make_state(0, 5)
        u = state.units
        r = np.array([1.0, 2.0])
        omega = bohmian_angular_velocity(state, r)
        want = (1.0 / u.mass) * (5.0 / r**2 + 1.0 / (2.0 * u.magnetic_length**2))
        np.testing.assert_allclose(omega, want, rtol=1e-13)
        assert bohmian_density_average(state) == pytest.approx(u.cyclotron, rel=1e-8)
        assert bohmian_density_average(make_state(1, 0)) == pytest.approx(u.larmor, rel=1e-12)
        assert bohmian_density_average(make_state(0, -5)) == pytest.approx(0.0, abs=1e-8)


class TestQuadratureEngine:
    def test_spec_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(r_max=-1.0)
        with pytest.raises(ValueError):
            QuadratureSpec(r_max=5.0, scheme="monte-carlo")

    def test_tail_bound_of_default_window(self):
        # integrand at r_max below 1e-14 of its peak
        for n_r, m in [(0, 0), (0, 10), (15, -15), (20, 20)]:
            state = make_state(n_r, m)
            spec = QuadratureSpec.for_state(state)
            r = np.linspace(0.0, spec.r_max, 4001)
            g = state.radial(r) ** 2 * r
            assert g[-1] <= 1e-14 * g.max()

    def test_engine_on_known_integral(self):
        # int_0^10 r e^{-r} dr = 1 - 11 e^{-10}
        want = 1.0 - 11.0 * math.exp(-10.0)
        spec_a = QuadratureSpec(r_max=10.0, scheme="adaptive-simpson")
        spec_g = QuadratureSpec(r_max=10.0, n_points=48, scheme="gauss-legendre-mapped")
        f = lambda r: r * np.exp(-r)
        assert integrate_radial(f, spec_a) == pytest.approx(want, rel=1e-11)
        assert integrate_radial(f, spec_g) == pytest.approx(want, rel=1e-12)

    def test_gl_supports_stacked_integrands(self):
        spec = QuadratureSpec(r_max=1.0, n_points=16, scheme="gauss-legendre-mapped")

        def f(r):
            return np.stack([np.ones_like(r), r, r**2])

        out = integrate_radial(f, spec)
        np.testing.assert_allclose(out, [1.0, 0.5, 1.0 / 3.0], rtol=1e-13)


class TestFieldGrid:
    def test_rotation_invariance(self):
        grid = field_grid(make_state(0, 3), extent=6.0, n=41)
        rho = grid.fields["rho"]
        # the density at mirrored points (x,y) -> (-x,-y) must coincide
        np.testing.assert_allclose(rho, rho[::-1, ::-1], rtol=0, atol=1e-15)

    def test_riemann_sum_near_unity(self):
        grid = field_grid(make_state(0, 2), n=301)
        total = grid.fields["rho"].sum() * grid.cell_area
        assert total == pytest.approx(1.0, abs=1e-3)

    def test_current_fields_tangential(self):
        grid = field_grid(make_state(0, 4), extent=5.0, n=51)
        X, Y = np.meshgrid(grid.x, grid.y, indexing="ij")
        dot = X * grid.fields["jx_tot"] + Y * grid.fields["jy_tot"]
        assert np.max(np.abs(dot)) <= 1e-12 * np.max(np.hypot(grid.fields["jx_tot"],
                                                              grid.fields["jy_tot"]))

    def test_divergence_free_total_current(self):
        # fourth-order central differences; boundary ring trimmed
        state = make_state(0, 10)
        grid = field_grid(state, extent=10.0, n=641)
        h = grid.x[1] - grid.x[0]

        def ddx(f, axis):
            return (8.0 * (np.roll(f, -1, axis) - np.roll(f, 1, axis))
                    - (np.roll(f, -2, axis) - np.roll(f, 2, axis))) / (12.0 * h)

        div = ddx(grid.fields["jx_tot"], 0) + ddx(grid.fields["jy_tot"], 1)
        peak = np.max(np.hypot(grid.fields["jx_tot"], grid.fields["jy_tot"]))
        interior = div[3:-3, 3:-3]
        assert np.max(np.abs(interior)) <= 1e-6 * peak

    def test_csv_round_trip(self, tmp_path):
        grid = field_grid(make_state(0, 1), extent=3.0, n=11)
        path = tmp_path / "grid.csv"
        grid.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "X,Y,rho,jx_can,jy_can,jx_gauge,jy_gauge,jx_tot,jy_tot"
        assert len(lines) == 1 + 11 * 11
        first = [float(v) for v in lines[1].split(",")]
        assert first[0] == grid.x[0]
        assert first[1] == grid.y[0]
        assert first[2] == grid.fields["rho"][0, 0]

    def test_oam_grid_fields(self):
        grid = oam_grid(make_state(1, -2), extent=5.0, n=21)
        np.testing.assert_array_equal(grid.fields["l_mech"],
                                      grid.fields["l_can"] + grid.fields["l_gauge"])
        np.testing.assert_array_equal(grid.fields["l_pot"], -grid.fields["l_gauge"])

    def test_rejects_bad_grid(self):
        with pytest.raises(ValueError):
            field_grid(make_state(0, 0), extent=-1.0)
