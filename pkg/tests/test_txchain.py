"""Transmitter chain: rotation, interleaving, normalization, waveform energy."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ciftn.channel import apply_channel_matrix, apply_channel_waveform
from ciftn.errors import OddLength
from ciftn.pulse import IsiKernel, PulseSpec, build_isi_matrix
from ciftn.txchain import (
    build_frame,
    compute_zeta,
    coordinate_deinterleave,
    coordinate_interleave,
    map_and_rotate,
    transmit_waveform,
)

SPEC06 = PulseSpec(alpha=0.3, tau=0.6)
K06 = IsiKernel.from_spec(SPEC06)

# the six-symbol walkthrough sequence
A6 = np.array([1.0, -1.0, 1.0, -1.0, 1.0, 1.0])
BITS6 = ((1 - A6) / 2).astype(np.uint8)


class TestMapAndRotate:
    def test_bit_zero(self):
        s = map_and_rotate([0])
        assert s[0] == pytest.approx((1 + 1j) / np.sqrt(2), abs=1e-15)

    def test_bit_one_sign_symmetry(self):
        assert map_and_rotate([1])[0] == pytest.approx(-(1 + 1j) / np.sqrt(2), abs=1e-15)

    def test_rotation_preserves_energy(self):
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, 100)
        s = map_and_rotate(bits, Eb=2.5)
        np.testing.assert_allclose(np.abs(s) ** 2, 2.5, atol=1e-12)

    def test_components_share_sign(self):
        s = map_and_rotate(np.random.default_rng(1).integers(0, 2, 50))
        np.testing.assert_array_equal(np.sign(s.real), np.sign(s.imag))


class TestInterleaving:
    def test_worked_sequence(self):
        # pre-normalization entries are (1/sqrt(2)) * [1-j x4, 1+j x2]
        x = coordinate_interleave(map_and_rotate(BITS6))
        expected = np.array([1 - 1j] * 4 + [1 + 1j] * 2) / np.sqrt(2)
        np.testing.assert_allclose(x, expected, atol=1e-15)

    def test_worked_sequence_transmit_magnitudes(self):
        frame = build_frame(BITS6, K06, mode="ci")
        tx = frame.zeta * frame.x
        np.testing.assert_allclose(np.abs(tx.real), 0.5794, atol=1e-4)
        np.testing.assert_allclose(np.abs(tx.imag), 0.5794, atol=1e-4)

    def test_all_equal_symbols_stay_equal(self):
        s = np.full(8, (1 + 1j) / np.sqrt(2))
        x = coordinate_interleave(s)
        assert np.all(x == x[0])

    def test_odd_length_rejected(self):
        with pytest.raises(OddLength):
            coordinate_interleave(np.ones(5, dtype=complex))
        with pytest.raises(OddLength):
            build_frame([0, 1, 0], K06)

    @given(st.integers(min_value=1, max_value=64), st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_bijection(self, half_len, seed):
        rng = np.random.default_rng(seed)
        s = rng.standard_normal(2 * half_len) + 1j * rng.standard_normal(2 * half_len)
        np.testing.assert_allclose(coordinate_deinterleave(coordinate_interleave(s)), s, atol=0)

    @pytest.mark.parametrize("n", [2, 4, 8, 12])
    def test_pair_sign_property_exhaustive(self, n):
        # every adjacent in-pair sample pair shares the source symbol's sign
        for pattern in range(2**n):
            bits = np.array([(pattern >> i) & 1 for i in range(n)], dtype=np.uint8)
            a = 1.0 - 2.0 * bits.astype(float)
            x = coordinate_interleave(map_and_rotate(bits))
            for k in range(0, n, 2):
                assert np.sign(x[k].real) == np.sign(x[k + 1].real) == np.sign(a[k])
                assert np.sign(x[k].imag) == np.sign(x[k + 1].imag) == np.sign(a[k + 1])

    def test_pair_sign_property_randomized_large(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            bits = rng.integers(0, 2, 672)
            a = 1.0 - 2.0 * bits.astype(float)
            x = coordinate_interleave(map_and_rotate(bits))
            assert np.all(np.sign(x[0::2].real) == np.sign(a[0::2]))
            assert np.all(np.sign(x[1::2].real) == np.sign(a[0::2]))
            assert np.all(np.sign(x[0::2].imag) == np.sign(a[1::2]))
            assert np.all(np.sign(x[1::2].imag) == np.sign(a[1::2]))


class TestZeta:
    def test_value_at_walkthrough_point(self):
        z = compute_zeta(K06)
        assert z == pytest.approx(0.8194, abs=5e-5)
        assert z / np.sqrt(2) == pytest.approx(0.5794, abs=5e-5)

    def test_nyquist_rate_is_unity(self):
        assert compute_zeta(IsiKernel.from_spec(PulseSpec(alpha=0.3, tau=1.0))) == 1.0

    def test_override(self):
        frame = build_frame(BITS6, K06, mode="ci", zeta=1.0)
        assert frame.zeta == 1.0


def waveform_energy(frame, spec):
    tx = transmit_waveform(frame, spec)
    return float(np.sum(np.abs(tx.samples) ** 2) * tx.dt)


class TestTransmitEnergy:
    def test_single_pulse_waveform(self):
        from ciftn.txchain import SymbolFrame

        frame = SymbolFrame(
            bits=np.array([0], dtype=np.uint8),
            a=np.array([1.0]),
            s=np.array([1.0 + 0j]),
            x=np.array([1.0 + 0j]),
            zeta=0.8,
            mode="conventional",
        )
        spec = PulseSpec(alpha=0.3, tau=0.6, oversampling=16)
        tx = transmit_waveform(frame, spec)
        assert np.abs(tx.samples[tx.origin]) == pytest.approx(
            0.8 * np.abs(tx.samples[tx.origin] / 0.8), abs=1e-12
        )
        assert waveform_energy(frame, spec) == pytest.approx(0.8**2, rel=1e-3)

    def test_adjacent_same_sign_pair_is_constructive(self):
        # matched-filter sample of the first of two same-sign pulses exceeds
        # the isolated-pulse value
        spec = PulseSpec(alpha=0.3, tau=0.6, oversampling=16)
        kern = IsiKernel.from_spec(spec)
        pair = build_frame([0, 0], kern, mode="conventional")
        rx = apply_channel_waveform(pair, spec, 0.0)
        assert rx.y[0].real > 1.0  # isolated pulse would give exactly g(0) = 1

    def test_mean_energy_matches_bit_budget(self):
        # Monte Carlo waveform-energy oracle: per-frame mean approaches N*Eb
        spec = PulseSpec(alpha=0.3, tau=0.6, oversampling=16)
        kern = IsiKernel.from_spec(spec)
        rng = np.random.default_rng(3)
        n, frames = 16, 3000
        total = 0.0
        for _ in range(frames):
            total += waveform_energy(build_frame(rng.integers(0, 2, n), kern, mode="ci"), spec)
        assert total / frames == pytest.approx(n * 1.0, rel=0.01)

    @pytest.mark.parametrize("tau", [0.9, 0.7, 0.5, 0.4])
    def test_energy_parity_with_conventional(self, tau):
        # interleaved and conventional chains spend the same energy per bit
        spec = PulseSpec(alpha=0.3, tau=tau, oversampling=8)
        kern = IsiKernel.from_spec(spec)
        rng = np.random.default_rng(int(tau * 100))
        n, frames = 16, 1500
        e_ci = e_conv = 0.0
        for _ in range(frames):
            bits = rng.integers(0, 2, n)
            e_ci += waveform_energy(build_frame(bits, kern, mode="ci"), spec)
            e_conv += waveform_energy(build_frame(bits, kern, mode="conventional"), spec)
        assert e_ci / e_conv == pytest.approx(1.0, abs=0.01)

    def test_oversampling_floor(self):
        frame = build_frame(BITS6, K06, mode="ci")
        with pytest.raises(ValueError, match="oversampling"):
            transmit_waveform(frame, PulseSpec(alpha=0.3, tau=0.6, oversampling=4))


class TestConventionalMode:
    def test_bypasses_rotation_and_interleaving(self):
        frame = build_frame(BITS6, K06, mode="conventional")
        np.testing.assert_array_equal(frame.x, frame.a.astype(complex))
        assert frame.zeta == 1.0

    def test_matrix_channel_uses_plain_symbols(self):
        G = build_isi_matrix(6, SPEC06)
        frame = build_frame(BITS6, K06, mode="conventional")
        rx = apply_channel_matrix(frame.x, G, frame.zeta, 0.0)
        np.testing.assert_allclose(rx.y.imag, 0.0, atol=1e-15)
