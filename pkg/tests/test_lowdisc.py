import math

import numpy as np
import pytest

from chorddisc.lowdisc import (
    PointSet2D,
    RectWitness,
    ld_sequence_2d,
    rect_discrepancy,
    reevaluate_rect,
    transport_to_measure,
)


def radical_inverse_oracle(i, bits=32):
    # digit-by-digit reference implementation
    out, f = 0.0, 0.5
    for _ in range(bits):
        out += (i & 1) * f
        i >>= 1
        f *= 0.5
    return out


def pascal_map_oracle(i, bits=32):
    digits = [(i >> k) & 1 for k in range(bits)]
    out = 0.0
    for j in range(bits):
        bit = sum(math.comb(k, j) * digits[k] for k in range(j, bits)) % 2
        out += bit * 0.5 ** (j + 1)
    return out


class TestGenerators:
    def test_digital_first_four_points(self):
        ps = ld_sequence_2d(4, "digital-base2")
        expected = [[0.0, 0.0], [0.5, 0.5], [0.25, 0.75], [0.75, 0.25]]
        assert ps.points.tolist() == expected

    def test_digital_matches_digit_oracle(self):
        ps = ld_sequence_2d(128, "digital-base2")
        for i in (0, 1, 17, 63, 100, 127):
            assert ps.points[i, 0] == pytest.approx(radical_inverse_oracle(i), abs=0)
            assert ps.points[i, 1] == pytest.approx(pascal_map_oracle(i), abs=0)

    @pytest.mark.parametrize("kind", ["digital-base2", "kronecker-fibonacci", "pseudorandom"])
    def test_single_point_in_unit_square(self, kind):
        ps = ld_sequence_2d(1, kind, seed=3)
        assert ps.points.shape == (1, 2)
        assert np.all((ps.points >= 0) & (ps.points < 1))

    def test_pseudorandom_deterministic(self):
        a = ld_sequence_2d(100, "pseudorandom", seed=42)
        b = ld_sequence_2d(100, "pseudorandom", seed=42)
        assert np.array_equal(a.points, b.points)
        c = ld_sequence_2d(100, "pseudorandom", seed=43)
        assert not np.array_equal(a.points, c.points)

    @pytest.mark.parametrize("kind", ["digital-base2", "kronecker-fibonacci", "pseudorandom"])
    @pytest.mark.parametrize("scramble", [False, True])
    def test_points_distinct(self, kind, scramble):
        ps = ld_sequence_2d(500, kind, seed=1, scramble=scramble)
        assert len({tuple(p) for p in ps.points.tolist()}) == 500

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            ld_sequence_2d(8, "halton")

    def test_invalid_points_rejected(self):
        with pytest.raises(ValueError):
            PointSet2D(points=np.array([[0.0, 1.0]]), kind="manual", seed=0)
        with pytest.raises(ValueError):
            PointSet2D(points=np.array([[0.1, 0.2], [0.1, 0.2]]), kind="manual", seed=0)


class TestTransport:
    def test_trace_of_digital_pair(self, disk_measure):
        tr = transport_to_measure(ld_sequence_2d(2, "digital-base2"), disk_measure)
        # (0.5, 0.5): uniform marginal keeps s = 0.5; the median conditional
        # gap is antipodal, so t wraps to 0
        assert tr.params[1, 0] == 0.5
        assert tr.params[1, 1] == 0.0

    def test_degenerate_input_nudged_and_recorded(self, disk_measure):
        tr = transport_to_measure(ld_sequence_2d(2, "digital-base2"), disk_measure)
        # (0, 0) is a coincident pair; the q coordinate gets the tie-break
        assert any(rec[0] == 0 and "q" in rec[1] for rec in tr.perturbations)
        s, t = tr.params[0]
        assert not disk_measure.is_degenerate_pair(s, t)

    def test_outputs_distinct(self, disk_measure):
        tr = transport_to_measure(ld_sequence_2d(512, "kronecker-fibonacci"), disk_measure)
        keys = {(min(s, t), max(s, t)) for s, t in tr.params.tolist()}
        assert len(keys) == 512

    def test_digital_beats_pseudorandom_median(self, disk_measure):
        ps = ld_sequence_2d(256, "digital-base2")
        digital = rect_discrepancy(transport_to_measure(ps, disk_measure).params,
                                   disk_measure, family="anchored").value
        rand_vals = []
        for seed in range(20):
            ps = ld_sequence_2d(256, "pseudorandom", seed=seed)
            rand_vals.append(rect_discrepancy(transport_to_measure(ps, disk_measure).params,
                                              disk_measure, family="anchored").value)
        assert digital < float(np.median(rand_vals))


def brute_force_anchored(points, cdf, grid):
    """Dense-grid lower bound on the anchored supremum, plus its resolution bound."""
    n = points.shape[0]
    u = np.arange(1, grid + 1) / grid
    counts_lt = np.zeros((grid, grid))
    ix = np.minimum((points[:, 0] * grid).astype(int), grid - 1)
    iy = np.minimum((points[:, 1] * grid).astype(int), grid - 1)
    h = np.zeros((grid, grid))
    np.add.at(h, (ix, iy), 1.0)
    counts_le = h.cumsum(0).cumsum(1)
    masses = n * cdf(u[:, None], u[None, :])
    best = float(np.max(np.abs(counts_le - masses)))
    strip_x = int(np.max(np.bincount(ix, minlength=grid)))
    strip_y = int(np.max(np.bincount(iy, minlength=grid)))
    bound = 2.0 * (n / grid + max(strip_x, strip_y))
    return best, bound


class TestRectDiscrepancy:
    def test_single_point_anchored(self):
        pts = np.array([[0.5, 0.5]])
        rep = rect_discrepancy(pts, "uniform", family="anchored")
        assert rep.value == pytest.approx(0.75, abs=1e-12)
        assert reevaluate_rect(pts, "uniform", rep.witness) == pytest.approx(rep.value, abs=1e-12)

    def test_full_square_contributes_zero(self):
        pts = ld_sequence_2d(32, "pseudorandom", seed=0).points
        wit = RectWitness(0.0, 1.0, 0.0, 1.0, True, True)
        assert reevaluate_rect(pts, "uniform", wit) == pytest.approx(0.0, abs=1e-9)

    def test_empty_point_set_rejected(self):
        with pytest.raises(ValueError):
            rect_discrepancy(np.empty((0, 2)), "uniform")

    def test_digital16_matches_grid_brute_force(self):
        pts = ld_sequence_2d(16, "digital-base2").points
        rep = rect_discrepancy(pts, "uniform", family="anchored")
        brute, bound = brute_force_anchored(pts, lambda x, y: x * y, 1000)
        assert rep.value >= brute - 1e-9
        assert rep.value <= brute + bound

    @pytest.mark.parametrize("mass_name", ["uniform", "disk"])
    @pytest.mark.parametrize("n", [16, 64])
    def test_exactness_against_dense_grid(self, mass_name, n, disk_measure):
        pts = ld_sequence_2d(n, "pseudorandom", seed=n).points
        mass = "uniform" if mass_name == "uniform" else disk_measure
        cdf = (lambda x, y: np.asarray(x) * np.asarray(y)) if mass_name == "uniform" \
            else disk_measure.anchored_mass
        rep = rect_discrepancy(pts, mass, family="anchored")
        brute, bound = brute_force_anchored(pts, cdf, 2000)
        assert brute - 1e-9 <= rep.value <= brute + bound

    @pytest.mark.parametrize("n", [8, 12])
    def test_allrect_exact_matches_exhaustive(self, n, disk_measure):
        for seed in range(4):
            pts = ld_sequence_2d(n, "pseudorandom", seed=seed).points
            for mass in ("uniform", disk_measure):
                fast = rect_discrepancy(pts, mass, family="all")
                slow = rect_discrepancy(pts, mass, family="all-exhaustive")
                assert fast.value == pytest.approx(slow.value, abs=1e-10)
                assert reevaluate_rect(pts, mass, fast.witness) == pytest.approx(fast.value, abs=1e-12)

    def test_anchored_vs_allrect_sandwich(self, disk_measure):
        for seed in range(5):
            pts = ld_sequence_2d(40, "pseudorandom", seed=seed).points
            for mass in ("uniform", disk_measure):
                anc = rect_discrepancy(pts, mass, family="anchored").value
                allr = rect_discrepancy(pts, mass, family="all").value
                assert anc - 1e-9 <= allr <= 4 * anc + 1e-9

    def test_witness_reproduces_value(self, disk_measure):
        pts = ld_sequence_2d(100, "kronecker-fibonacci").points
        for family in ("anchored", "all"):
            rep = rect_discrepancy(pts, disk_measure, family=family)
            assert reevaluate_rect(pts, disk_measure, rep.witness) == pytest.approx(
                rep.value, abs=1e-12)


class TestScaling:
    def test_digital_transport_growth_near_flat(self, disk_measure):
        # digitally shifted net; count-unit anchored discrepancy against the
        # endpoint measure grows nearly flat across doublings
        deltas = {}
        for k in range(4, 15):
            ps = ld_sequence_2d(2**k, "digital-base2", seed=0, scramble=True)
            tr = transport_to_measure(ps, disk_measure)
            deltas[k] = rect_discrepancy(tr.params, disk_measure, family="anchored").value
        ok = sum(
            deltas[k + 1] <= deltas[k] * (1 + 2 * math.log(2) / math.log(2.0**k)) + 2
            for k in range(4, 14)
        )
        assert ok >= 8  # at least 80% of the ten steps

    def test_pseudorandom_transport_grows_like_sqrt(self, disk_measure):
        ratios = []
        for k in (4, 6, 8, 10):
            for seed in range(3):
                d = {}
                for kk in (k, k + 2):
                    ps = ld_sequence_2d(2**kk, "pseudorandom", seed=seed)
                    tr = transport_to_measure(ps, disk_measure)
                    d[kk] = rect_discrepancy(tr.params, disk_measure, family="anchored").value
                ratios.append(d[k + 2] / d[k])
        assert 1.5 <= float(np.median(ratios)) <= 2.8
