import numpy as np
import pytest

import cgolab as cg
from cgolab.errors import InfeasibleGeometryError, NotContractiveError


@pytest.fixture(scope="module")
def pair32():
    return cg.zeta_pair_from_angle(np.array([0.0, 0.0, 1.0]), 16.0, 0.3)


class TestSolvePsi:
    def test_uniform_gamma_trivial_path(self, uniform32, pair32):
        psi, rep = cg.solve_psi(uniform32, pair32.zeta1)
        assert rep.converged
        assert rep.iterations == 1
        assert rep.residual_xdot == 0.0
        assert rep.psi_norm_xdot == 0.0
        assert np.max(np.abs(psi.values)) == 0.0

    def test_smooth_bump_converges(self, bump32, pair32):
        psi, rep = cg.solve_psi(bump32, pair32.zeta1, tol=1e-10)
        assert rep.converged
        assert rep.contraction_estimates
        assert rep.contraction_estimates[-1] < 1.0
        assert rep.residual_xdot <= 1e-10
        assert rep.psi_norm_xdot > 0

    def test_regression_baseline(self, bump32, pair32):
        # frozen after review against the independent residual check
        psi, rep = cg.solve_psi(bump32, pair32.zeta1, tol=1e-10, seed_irrelevant=None) \
            if False else cg.solve_psi(bump32, pair32.zeta1, tol=1e-10)
        assert rep.psi_norm_xdot == pytest.approx(0.013614528516551755, rel=1e-9)
        assert rep.iterations == 4

    def test_residual_independent_of_solver_bookkeeping(self, bump32, pair32):
        # re-derive the residual from scratch at the returned psi
        psi, rep = cg.solve_psi(bump32, pair32.zeta1, tol=1e-10)
        q = cg.potential_q(bump32)
        w = cg.physical_field(bump32.grid, q.values * (1.0 + cg.to_physical(psi).values))
        posed = cg.dealias_23(cg.to_spectral(w))
        res = cg.apply_delta_zeta(psi, pair32.zeta1) - posed
        val = cg.xdot_norm(res, pair32.zeta1, -0.5, 1e-6, "drop")
        assert val == pytest.approx(rep.residual_xdot, rel=1e-9)

    def test_clamp_sensitivity_reevaluation(self, bump32, pair32):
        psi, rep = cg.solve_psi(bump32, pair32.zeta1, tol=1e-10, clamp_eps=1e-6)
        psi2, rep2 = cg.solve_psi(bump32, pair32.zeta1, tol=1e-10, clamp_eps=1e-7)
        assert rep2.residual_xdot <= 2 * max(rep.residual_xdot, 1e-14)

    def test_divergence_raises_with_ratio(self, grid32):
        strong = cg.make_conductivity(grid32, {"kind": "cone", "amplitude": 30.0, "radius": 1.1})
        pair = cg.zeta_pair_from_angle(np.array([0.0, 0.0, 1.0]), 4.0, 0.0)
        with pytest.raises(NotContractiveError) as err:
            cg.solve_psi(strong, pair.zeta1, tol=1e-10, max_iter=80)
        assert err.value.ratio >= 1.0

    def test_divergence_depends_on_frame_angle(self, grid32):
        # the contraction threshold is direction-dependent: some eta1
        # samples diverge while others converge
        strong = cg.make_conductivity(grid32, {"kind": "cone", "amplitude": 30.0, "radius": 1.1})
        outcomes = []
        for theta in np.linspace(0.0, np.pi, 4):
            pair = cg.zeta_pair_from_angle(np.array([0.0, 0.0, 1.0]), 4.0, float(theta))
            try:
                _, rep = cg.solve_psi(strong, pair.zeta1, tol=1e-10, max_iter=80)
                outcomes.append(rep.converged)
            except NotContractiveError:
                outcomes.append(False)
        assert any(outcomes) and not all(outcomes)

    def test_contraction_consistent_with_operator_estimate(self, bump32, pair32):
        _, rep = cg.solve_psi(bump32, pair32.zeta1, tol=1e-10)
        est = cg.mq_operator_ratio(
            bump32, pair32, trials=8, seed=2, s_values=[pair32.s], mode="power"
        )
        bound = est.samples[0].lhs
        assert rep.contraction_estimates[-1] <= 2.0 * bound

    def test_invalid_tolerance(self, bump32, pair32):
        with pytest.raises(ValueError):
            cg.solve_psi(bump32, pair32.zeta1, tol=0.0)


class TestSelectZeta:
    K = np.array([0.0, 0.0, 1.0])

    def test_uniform_conductivity_returns_first_sample(self, uniform32):
        sels = cg.select_zeta_sequence([uniform32], self.K, [8.0], 5, seed=3)
        sel = sels[0]
        assert sel.objective == 0.0
        assert all(row[2] == 0.0 for row in sel.samples)
        # ties broken lexicographically on (s, angle)
        expected = min(sel.samples, key=lambda r: (r[2], r[0], r[1]))
        assert sel.pair.s == expected[0]

    def test_objective_decreases_across_bands(self, bump32):
        sels = cg.select_zeta_sequence([bump32], self.K, [8.0, 16.0, 32.0], 8, seed=5)
        objs = [s.objective for s in sels]
        assert objs[0] > objs[1] > objs[2]

    def test_min_not_above_mean(self, bump32):
        sel = cg.select_zeta_sequence([bump32], self.K, [8.0], 8, seed=6)[0]
        values = [row[2] for row in sel.samples]
        assert sel.objective <= np.mean(values)

    def test_deterministic_under_seed(self, bump32):
        a = cg.select_zeta_sequence([bump32], self.K, [8.0, 16.0], 6, seed=11)
        b = cg.select_zeta_sequence([bump32], self.K, [8.0, 16.0], 6, seed=11)
        assert [s.pair.s for s in a] == [s.pair.s for s in b]
        assert [s.objective for s in a] == [s.objective for s in b]

    def test_infeasible_k(self, bump32):
        with pytest.raises(InfeasibleGeometryError):
            cg.select_zeta_sequence([bump32], np.array([0.0, 0.0, 20.0]), [8.0], 4, seed=0)

    def test_bad_bands_rejected(self, bump32):
        with pytest.raises(InfeasibleGeometryError):
            cg.select_zeta_sequence([bump32], self.K, [16.0, 8.0], 4, seed=0)
        with pytest.raises(InfeasibleGeometryError):
            cg.select_zeta_sequence([bump32], self.K, [8.0], 0, seed=0)

    def test_off_lattice_k_rejected(self, bump32):
        with pytest.raises(ValueError):
            cg.select_zeta_sequence([bump32], np.array([0.0, 0.0, 0.5]), [8.0], 4, seed=0)
