import math

import numpy as np
import pytest

from diracpairs.errors import UnsupportedModel
from diracpairs.spectral import (
    CircleDiracModel,
    ModeIndex,
    SyntheticSpectrum,
    TruncationWindow,
    ambient_dimension,
    eigenvalue,
    enumerate_modes,
    involution_matrix,
    kernel_dimension,
    mode_position,
    operator_matrix,
    zero_modes,
)

TWO_PI = 2 * math.pi


class TestEigenvalueRule:
    def test_zero_mode_of_trivial_spin(self, trivial_model):
        assert eigenvalue(trivial_model, ModeIndex(0)) == 0.0

    def test_integer_spectrum(self, trivial_model):
        assert eigenvalue(trivial_model, ModeIndex(3)) == pytest.approx(6 * math.pi, abs=0)

    def test_half_integer_spectrum_scaled_circle(self):
        model = CircleDiracModel(delta=0.5, theta=0.0, length=2.0)
        assert eigenvalue(model, ModeIndex(-1)) == pytest.approx(-math.pi / 2, abs=0)

    def test_doubled_branches(self, doubled_model):
        plus = eigenvalue(doubled_model, ModeIndex(3, 1))
        minus = eigenvalue(doubled_model, ModeIndex(3, 2))
        assert plus == -minus == pytest.approx(6 * math.pi)

    def test_invalid_channel_raises(self, trivial_model):
        with pytest.raises(ValueError):
            eigenvalue(trivial_model, ModeIndex(0, 2))

    def test_strictly_increasing_in_k(self):
        model = CircleDiracModel(theta=0.3, length=1.7, rank=2)
        values = [eigenvalue(model, ModeIndex(k, 1)) for k in range(-6, 7)]
        assert all(b > a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("c", [0.5, 2.0, 3.0])
    def test_length_scaling(self, c):
        base = CircleDiracModel(theta=0.25)
        scaled = CircleDiracModel(theta=0.25, length=c)
        for k in range(-5, 6):
            lam = eigenvalue(base, ModeIndex(k))
            lam_scaled = eigenvalue(scaled, ModeIndex(k))
            assert lam_scaled == pytest.approx(lam / c)
            # sign pattern (hence every zero-cut subspace) is unchanged
            assert np.sign(lam_scaled) == np.sign(lam)


class TestKernelDimension:
    @pytest.mark.parametrize(
        "delta,theta,rank,expected",
        [
            (0.0, 0.0, 1, 1),
            (0.5, 0.0, 1, 0),
            (0.0, 0.25, 3, 0),
            (0.5, 0.5, 2, 2),  # delta + theta = 1 hits k = -1
        ],
    )
    def test_rule(self, delta, theta, rank, expected):
        model = CircleDiracModel(delta=delta, theta=theta, rank=rank)
        assert kernel_dimension(model) == expected

    def test_matches_truncated_spectrum_scan(self):
        # independent oracle: count exact zeros among enumerated eigenvalues
        for theta in (0.0, 0.25, 0.5):
            for delta in (0.0, 0.5):
                model = CircleDiracModel(delta=delta, theta=theta, rank=3)
                scan = sum(
                    1 for _, ev in enumerate_modes(model, TruncationWindow(8)) if ev == 0.0
                )
                assert kernel_dimension(model) == scan

    def test_doubled_kernel(self, doubled_model):
        assert kernel_dimension(doubled_model) == 2
        assert len(zero_modes(doubled_model)) == 2


class TestEnumeration:
    def test_three_mode_window(self, trivial_model):
        modes = enumerate_modes(trivial_model, TruncationWindow(1))
        assert [(m.k, ev) for m, ev in modes] == [(-1, -TWO_PI), (0, 0.0), (1, TWO_PI)]

    def test_multiplicity_duplication(self):
        model = CircleDiracModel(rank=2)
        modes = enumerate_modes(model, TruncationWindow(1))
        assert len(modes) == 6
        assert [ev for _, ev in modes] == [-TWO_PI, -TWO_PI, 0.0, 0.0, TWO_PI, TWO_PI]

    def test_doubled_window(self, doubled_model):
        modes = enumerate_modes(doubled_model, TruncationWindow(1))
        assert len(modes) == 6
        values = sorted(ev for _, ev in modes)
        assert values == [-TWO_PI, -TWO_PI, 0.0, 0.0, TWO_PI, TWO_PI]

    def test_positions_are_lexicographic(self, doubled_model):
        window = TruncationWindow(2)
        modes = [m for m, _ in enumerate_modes(doubled_model, window)]
        for i, mode in enumerate(modes):
            assert mode_position(doubled_model, window, mode) == i
        assert ambient_dimension(doubled_model, window) == len(modes) == 10


class TestDoubledInvolution:
    def test_anticommutes_exactly(self, doubled_model):
        window = TruncationWindow(3)
        a = operator_matrix(doubled_model, window)
        g = involution_matrix(doubled_model, window)
        anti = a @ g + g @ a
        assert np.array_equal(anti, np.zeros_like(anti))

    def test_involution_squares_to_identity(self, doubled_model):
        window = TruncationWindow(2)
        g = involution_matrix(doubled_model, window)
        assert np.array_equal(g @ g, np.eye(g.shape[0]))

    def test_requires_doubled(self, trivial_model):
        with pytest.raises(UnsupportedModel):
            involution_matrix(trivial_model, TruncationWindow(2))


class TestValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"delta": 0.3},
            {"theta": 1.0},
            {"theta": -0.1},
            {"length": 0.0},
            {"rank": 0},
        ],
    )
    def test_bad_model(self, kwargs):
        with pytest.raises(ValueError):
            CircleDiracModel(**kwargs)

    def test_bad_window(self):
        with pytest.raises(ValueError):
            TruncationWindow(0)


class TestSyntheticSpectrum:
    def test_round_trip(self):
        spec = SyntheticSpectrum(entries=((-2.5, 1), (0.0, 2), (1.5, 1)))
        assert kernel_dimension(spec) == 2
        assert eigenvalue(spec, ModeIndex(0, 1)) == -2.5
        modes = enumerate_modes(spec, TruncationWindow(4))
        assert len(modes) == 4
        assert [m.c for m, _ in modes] == [1, 1, 2, 1]

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            SyntheticSpectrum(entries=((1.0, 1), (0.0, 1)))

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            SyntheticSpectrum(entries=((1.0, 1), (1.0, 2)))
