import numpy as np
import pytest

from diracpairs._linalg import RankPolicy, haar_subspace, numerical_rank
from diracpairs.conditions import (
    FiniteMod,
    FullSpace,
    GraphForm,
    GraphMap,
    ProjectorMatrix,
    Side,
    SpectralCut,
    ZeroSpace,
    materialize,
)
from diracpairs.errors import IllConditioned
from diracpairs.fredholm import (
    PairDiagnostics,
    Verdict,
    check_pair_algebra,
    fredholm_verdict,
    pair_diagnostics,
    pair_diagnostics_oracle,
    stabilization_verdict,
)
from diracpairs.scenarios import UltrastaticSpec
from diracpairs.spectral import ModeIndex

PAST_CUT = SpectralCut(0.0, Side.PAST)
FUTURE_CUT = SpectralCut(0.0, Side.FUTURE)


def projector_from_basis(basis):
    return ProjectorMatrix(basis @ basis.conj().T)


class TestPairDiagnostics:
    def test_spectral_cut_pair(self, trivial_model, window4):
        p0 = materialize(PAST_CUT, trivial_model, window4)
        p1 = materialize(FUTURE_CUT, trivial_model, window4)
        d = pair_diagnostics(p0, p1)
        assert (d.dim_intersection, d.dim_cokernel, d.index) == (0, 1, -1)

    def test_zero_against_full(self, trivial_model, window4):
        p0 = materialize(ZeroSpace(), trivial_model, window4)
        p1 = materialize(FullSpace(), trivial_model, window4)
        d = pair_diagnostics(p0, p1)
        assert (d.dim_intersection, d.dim_cokernel, d.index) == (0, 0, 0)

    def test_same_subspace_twice(self, rng):
        n, r = 9, 4
        basis = haar_subspace(n, r, rng)
        p = projector_from_basis(basis)
        d = pair_diagnostics(p, p)
        assert d.dim_intersection == r
        assert d.dim_cokernel == n - r
        assert d.index == 2 * r - n

    def test_complementary_pair(self, rng):
        n, r = 8, 3
        basis = haar_subspace(n, r, rng)
        p0 = projector_from_basis(basis)
        p1 = ProjectorMatrix(np.eye(n) - p0.matrix)
        d = pair_diagnostics(p0, p1)
        assert (d.dim_intersection, d.dim_cokernel, d.index) == (0, 0, 0)

    def test_generic_position_ranks(self, rng):
        # rank-3 and rank-5 subspaces of a 12-dimensional space in general
        # position: trivial intersection, their sum has rank 8
        p0 = projector_from_basis(haar_subspace(12, 3, rng))
        p1 = projector_from_basis(haar_subspace(12, 5, rng))
        d = pair_diagnostics_oracle(p0, p1)
        assert (d.dim_intersection, d.dim_cokernel, d.index) == (0, 4, -4)
        assert pair_diagnostics(p0, p1).same_integers(d)

    def test_ill_conditioned_rank_decision_raises(self):
        # singular values 1, 3e-8, 3e-9 straddle the threshold without the
        # required ratio between kept and dropped values
        c0 = np.zeros((8, 3), dtype=complex)
        c0[0, 0] = 1.0
        c0[1, 1] = 3e-8
        c0[2, 1] = np.sqrt(1 - (3e-8) ** 2)
        c0[3, 2] = 3e-9
        c0[4, 2] = np.sqrt(1 - (3e-9) ** 2)
        p0 = projector_from_basis(c0)
        c1perp = np.zeros((8, 3), dtype=complex)
        c1perp[0, 0] = 1.0
        c1perp[1, 1] = 1.0
        c1perp[3, 2] = 1.0
        p1 = ProjectorMatrix(np.eye(8) - c1perp @ c1perp.conj().T)
        with pytest.raises(IllConditioned):
            pair_diagnostics(p0, p1)

    def test_dimension_mismatch(self, rng):
        p0 = projector_from_basis(haar_subspace(6, 2, rng))
        p1 = projector_from_basis(haar_subspace(8, 2, rng))
        with pytest.raises(ValueError):
            pair_diagnostics(p0, p1)


class TestRouteEquivalence:
    @pytest.mark.parametrize("n", [6, 12, 24])
    def test_two_hundred_random_pairs(self, n):
        rng = np.random.default_rng(100 + n)
        for _ in range(200):
            r0 = int(rng.integers(0, n + 1))
            r1 = int(rng.integers(0, n + 1))
            p0 = projector_from_basis(haar_subspace(n, r0, rng))
            p1 = projector_from_basis(haar_subspace(n, r1, rng))
            a = pair_diagnostics(p0, p1)
            b = pair_diagnostics_oracle(p0, p1)
            assert a.same_integers(b)
            # finite-dimension identity
            assert a.index == r0 - (n - r1)


class TestPairAlgebra:
    @pytest.mark.parametrize("n", [6, 12, 24])
    def test_identities_on_random_pairs(self, n):
        rng = np.random.default_rng(4000 + n)
        for trial in range(200):
            r0 = int(rng.integers(0, n))
            r1 = int(rng.integers(0, n + 1))
            p0 = projector_from_basis(haar_subspace(n, r0, rng))
            p1 = projector_from_basis(haar_subspace(n, r1, rng))
            record = check_pair_algebra(p0, p1, seed=trial)
            assert record.symmetry_holds
            assert record.complement_flip_holds
            assert record.enlargement_holds


class TestStabilization:
    @staticmethod
    def _diag(ker, coker, window):
        return PairDiagnostics(
            dim_b0=10,
            dim_b1=10,
            dim_intersection=ker,
            dim_cokernel=coker,
            index=ker - coker,
            condition_gap=float("inf"),
            window=window,
        )

    def test_constant_tail_is_fredholm(self):
        diags = [self._diag(k, c, w) for (k, c), w in zip([(2, 3), (1, 2), (1, 2), (1, 2)], [8, 16, 32, 64])]
        verdict = stabilization_verdict(diags)
        assert verdict == Verdict(kind="fredholm", index=-1)

    def test_growing_kernel(self):
        diags = [self._diag(k, 0, w) for k, w in zip([4, 8, 9, 10], [8, 16, 32, 64])]
        assert stabilization_verdict(diags) == Verdict(kind="not_fredholm", reason="growing_kernel")

    def test_growing_cokernel(self):
        diags = [self._diag(0, c, w) for c, w in zip([4, 8, 9, 10], [8, 16, 32, 64])]
        assert stabilization_verdict(diags) == Verdict(
            kind="not_fredholm", reason="growing_cokernel"
        )

    def test_kernel_growth_takes_precedence(self):
        diags = [self._diag(k, k, w) for k, w in zip([4, 8, 9], [8, 16, 32])]
        assert stabilization_verdict(diags).reason == "growing_kernel"

    def test_plateau_after_growth_is_inconclusive(self):
        diags = [self._diag(k, 0, w) for k, w in zip([4, 8, 9, 9], [8, 16, 32, 64])]
        assert stabilization_verdict(diags) == Verdict(kind="inconclusive")

    def test_needs_three_windows(self):
        diags = [self._diag(0, 0, 8), self._diag(0, 0, 16)]
        with pytest.raises(ValueError):
            stabilization_verdict(diags)


class TestFredholmVerdict:
    def test_aps_pair_is_fredholm_minus_one(self, trivial_model):
        report = fredholm_verdict(
            PAST_CUT, FUTURE_CUT, UltrastaticSpec(1.0), trivial_model
        )
        assert report.verdict == Verdict(kind="fredholm", index=-1)
        for diag in report.diagnostics:
            assert diag.index == -1

    def test_anti_aps_pair_flips_the_sign(self, trivial_model):
        anti0 = FiniteMod(base=FUTURE_CUT, add=(ModeIndex(0),))
        anti1 = FiniteMod(base=PAST_CUT, add=(ModeIndex(0),))
        report = fredholm_verdict(anti0, anti1, UltrastaticSpec(1.0), trivial_model)
        assert report.verdict == Verdict(kind="fredholm", index=1)

    def test_unitary_graph_pair_grows(self, trivial_model):
        cond0 = GraphForm(base_cut=PAST_CUT, g=GraphMap.mirror(1.0))
        cond1 = GraphForm(base_cut=FUTURE_CUT, g=GraphMap.mirror(1.0))
        report = fredholm_verdict(cond0, cond1, UltrastaticSpec(1.0), trivial_model)
        assert report.verdict.kind == "not_fredholm"
        assert report.verdict.reason == "growing_kernel"
        for diag in report.diagnostics:
            assert diag.dim_intersection == diag.window

    def test_schedule_validation(self, trivial_model):
        with pytest.raises(ValueError):
            fredholm_verdict(
                PAST_CUT, FUTURE_CUT, UltrastaticSpec(1.0), trivial_model, schedule=(8, 16)
            )
        with pytest.raises(ValueError):
            fredholm_verdict(
                PAST_CUT, FUTURE_CUT, UltrastaticSpec(1.0), trivial_model, schedule=(8, 8, 16)
            )


class TestRankPolicy:
    def test_threshold_is_relative_with_unit_floor(self):
        rank, gap = numerical_rank(np.array([1.0, 1e-5, 1e-12]))
        assert rank == 2
        assert gap == pytest.approx(1e7)

    def test_noise_matrix_has_rank_zero(self):
        rank, _ = numerical_rank(np.array([3e-16, 1e-16]))
        assert rank == 0

    def test_gap_violation_raises(self):
        with pytest.raises(IllConditioned):
            numerical_rank(np.array([1.0, 3e-8, 3e-9]))

    def test_policy_is_configurable(self):
        loose = RankPolicy(tau=1e-6, gap_ratio=2.0)
        rank, _ = numerical_rank(np.array([1.0, 3e-8, 3e-9]), loose)
        assert rank == 1
