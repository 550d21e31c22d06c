"""Constellation mapping, frame type and seeding contracts."""
import numpy as np
import numpy.testing as npt
import pytest

from afdmrsma import (Domain, Frame, InvalidLength, demodulate_symbols, frame_rng,
                      modulate_bits, qpsk)

RT2 = np.sqrt(2.0)


class TestQpsk:
    def test_unit_energy(self):
        c = qpsk()
        assert abs(np.mean(np.abs(c.points) ** 2) - 1.0) < 1e-12

    def test_gray_neighbours_differ_in_one_bit(self):
        c = qpsk()
        labels = np.arange(4)
        # sort points by angle; adjacent points must differ in one bit
        order = np.argsort(np.angle(c.points))
        ring = labels[order]
        for a, b in zip(ring, np.roll(ring, -1)):
            assert bin(a ^ b).count("1") == 1

    def test_known_points(self):
        c = qpsk()
        npt.assert_allclose(modulate_bits([0, 0], c), [(1 + 1j) / RT2], atol=1e-15)
        npt.assert_allclose(modulate_bits([1, 1], c), [(-1 - 1j) / RT2], atol=1e-15)

    def test_bulk_power_exact(self):
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, 1000)
        syms = modulate_bits(bits, qpsk())
        assert syms.size == 500
        # QPSK points are unit modulus, so empirical power is exactly 1
        assert np.mean(np.abs(syms) ** 2) == pytest.approx(1.0, abs=1e-14)

    def test_odd_length_rejected(self):
        with pytest.raises(InvalidLength):
            modulate_bits([0, 1, 0], qpsk())


class TestDemodulate:
    def test_nearest_point(self):
        bits = demodulate_symbols([(0.9 + 0.8j) / RT2], qpsk())
        npt.assert_array_equal(bits, [0, 0])

    def test_round_trip_all_symbols(self):
        c = qpsk()
        for label in range(4):
            bits = [(label >> 1) & 1, label & 1]
            npt.assert_array_equal(demodulate_symbols(modulate_bits(bits, c), c), bits)

    def test_round_trip_random(self):
        c = qpsk()
        rng = np.random.default_rng(1)
        for _ in range(20):
            bits = rng.integers(0, 2, 64)
            npt.assert_array_equal(demodulate_symbols(modulate_bits(bits, c), c), bits)

    def test_tie_breaks_to_lowest_label(self):
        # the origin is equidistant from all four points
        npt.assert_array_equal(demodulate_symbols([0.0 + 0.0j], qpsk()), [0, 0])


class TestFrame:
    def test_immutable_payload(self):
        f = Frame(np.ones(8), Domain.TIME)
        with pytest.raises(ValueError):
            f.data[0] = 0.0

    def test_domain_preserved_by_copy(self):
        f = Frame(np.ones(8), Domain.AFFINE)
        g = f.with_data(f.data * 2)
        assert g.domain is Domain.AFFINE


class TestSeeding:
    def test_counter_derivation_reproducible(self):
        a = frame_rng(42, 3, 7).standard_normal(16)
        b = frame_rng(42, 3, 7).standard_normal(16)
        npt.assert_array_equal(a, b)

    def test_counter_derivation_distinct(self):
        a = frame_rng(42, 3, 7).standard_normal(16)
        b = frame_rng(42, 3, 8).standard_normal(16)
        c = frame_rng(42, 4, 7).standard_normal(16)
        d = frame_rng(43, 3, 7).standard_normal(16)
        assert not np.allclose(a, b)
        assert not np.allclose(a, c)
        assert not np.allclose(a, d)
