import math

import numpy as np
import pytest

from chorddisc import chord_from_params, make_disk
from chorddisc.chordmeasure import (
    EndpointMeasure,
    InternalConsistencyError,
    KoksmaCheck,
    ParamRect,
    chord_length_grid,
    hk_variation,
    koksma_gap_check,
)
from chorddisc.lowdisc import ld_sequence_2d, rect_discrepancy, transport_to_measure

TWO_PI = 2 * math.pi


class TestDensity:
    def test_disk_antipodal_gap(self, disk_measure):
        # angle-coordinate density sin(pi/2)/(8 pi); fraction coords scale by (2 pi)^2
        frac = disk_measure.density(0.0, 0.5)
        assert frac == pytest.approx(math.pi / 2, rel=1e-12)
        assert frac / TWO_PI**2 == pytest.approx(1.0 / (8 * math.pi), rel=1e-12)

    def test_diagonal_is_zero(self, disk_measure, square_measure):
        assert disk_measure.density(0.3, 0.3) == 0.0
        assert square_measure.density(0.77, 0.77) == 0.0

    def test_same_flat_side_is_zero(self, square_measure):
        assert square_measure.density(0.05, 0.2) == 0.0

    def test_normalization_by_quadrature(self, disk_measure, square_measure):
        # independent route: numerically integrate the density itself
        assert disk_measure.rect_mass_quadrature(ParamRect.full_square()) == pytest.approx(1.0, abs=1e-9)
        assert square_measure.rect_mass_quadrature(ParamRect.full_square()) == pytest.approx(1.0, abs=1e-6)


class TestRectMass:
    def test_disk_half_window(self, disk_measure):
        r = ParamRect.from_bounds(0.0, 0.5, 0.5, 1.0)  # angles [0, pi) x [pi, 2 pi)
        assert disk_measure.rect_mass(r) == pytest.approx(1 / math.pi, abs=1e-12)
        assert disk_measure.rect_mass_quadrature(r) == pytest.approx(1 / math.pi, abs=1e-9)

    def test_full_square_normalization(self, disk_measure, square_measure):
        assert disk_measure.rect_mass(ParamRect.full_square()) == pytest.approx(1.0, abs=1e-12)
        assert square_measure.rect_mass(ParamRect.full_square()) == pytest.approx(1.0, abs=1e-12)

    def test_empty_rect_rejected(self):
        with pytest.raises(ValueError):
            ParamRect.from_bounds(0.25, 0.25, 0.0, 0.5)

    @pytest.mark.parametrize("measure_name", ["disk_measure", "square_measure"])
    def test_matches_quadrature_on_random_rects(self, measure_name, request):
        measure = request.getfixturevalue(measure_name)
        rng = np.random.default_rng(2)
        for _ in range(12):
            a, c = rng.random(2)
            b = (a + rng.uniform(0.05, 0.95)) % 1.0
            d = (c + rng.uniform(0.05, 0.95)) % 1.0
            rect = ParamRect.from_bounds(a, a + (b - a) % 1.0, c, c + (d - c) % 1.0)
            closed = measure.rect_mass(rect)
            quad = measure.rect_mass_quadrature(rect)
            assert closed == pytest.approx(quad, abs=5e-7)

    def test_monotone_under_inclusion(self, disk_measure, square_measure):
        rng = np.random.default_rng(9)
        for measure in (disk_measure, square_measure):
            for _ in range(40):
                a, c = rng.random(2)
                l1, l2 = rng.uniform(0.05, 0.45, 2)
                inner = ParamRect(a, l1, c, l2)
                outer = ParamRect(a, min(l1 + rng.uniform(0, 0.4), 1.0),
                                  c, min(l2 + rng.uniform(0, 0.4), 1.0))
                assert measure.rect_mass(outer) >= measure.rect_mass(inner) - 1e-12

    def test_cyclic_split_additivity(self, square_measure):
        # a wrapped interval carries the same mass as its two linear pieces
        whole = ParamRect.from_bounds(0.8, 1.3, 0.4, 0.6)
        left = ParamRect.from_bounds(0.8, 1.0, 0.4, 0.6)
        right = ParamRect.from_bounds(0.0, 0.3, 0.4, 0.6)
        total = square_measure.rect_mass(left) + square_measure.rect_mass(right)
        assert square_measure.rect_mass(whole) == pytest.approx(total, abs=1e-13)

    def test_anchored_mass_consistent_with_rect_mass(self, square_measure):
        rng = np.random.default_rng(4)
        for _ in range(25):
            x, y = rng.uniform(0.05, 1.0, 2)
            rect = ParamRect.from_bounds(0.0, x, 0.0, y)
            assert square_measure.anchored_mass(x, y) == pytest.approx(
                square_measure.rect_mass(rect), abs=1e-12)

    def test_window_counts_scale_to_pair_target(self, disk_measure):
        # with N = 2 L / pi chords, twice the window mass reproduces the
        # localized pair-count target L / (2 pi^2) * iint sin((y - x) / 2)
        rng = np.random.default_rng(8)
        for _ in range(10):
            a = rng.uniform(0, 0.2)
            b = a + rng.uniform(0.02, 0.1)
            c = rng.uniform(b + 0.05, b + 0.2)
            d = c + rng.uniform(0.02, 0.1)
            mass = disk_measure.rect_mass(ParamRect.from_bounds(a, b, c, d))
            L = 37.3
            n_chords = 2 * L / math.pi
            lhs = 2 * n_chords * mass
            # angle-coordinate double integral of sin((y - x) / 2)
            def anti(x, y):
                return 4 * math.sin((y - x) / 2)
            aa, bb, cc, dd = (TWO_PI * v for v in (a, b, c, d))
            integral = anti(bb, dd) - anti(aa, dd) - anti(bb, cc) + anti(aa, cc)
            rhs = L / (2 * math.pi**2) * integral
            assert lhs == pytest.approx(rhs, abs=1e-9)


class TestConditional:
    def test_disk_median_is_antipodal(self, disk_measure):
        t = disk_measure.conditional_inverse(0.2, 0.5)
        assert t == pytest.approx(0.7, abs=1e-14)

    def test_disk_first_quartile_gap(self, disk_measure):
        # invert (1 - cos(gap/2)) / 2 = 1/4 -> angle gap 2 pi / 3
        t = disk_measure.conditional_inverse(0.0, 0.25)
        assert t * TWO_PI == pytest.approx(2 * math.pi / 3, rel=1e-12)

    def test_degenerate_at_zero(self, disk_measure):
        assert disk_measure.conditional_inverse(0.125, 0.0) == pytest.approx(0.125)
        assert disk_measure.is_degenerate_pair(0.125, disk_measure.conditional_inverse(0.125, 0.0))

    @pytest.mark.parametrize("measure_name", ["disk_measure", "square_measure"])
    def test_cdf_roundtrip(self, measure_name, request):
        measure = request.getfixturevalue(measure_name)
        rng = np.random.default_rng(12)
        s = rng.random(400)
        q = rng.uniform(1e-3, 1 - 1e-3, 400)
        t = measure.conditional_inverse(s, q)
        assert np.max(np.abs(measure.conditional_cdf(s, t) - q)) < 1e-12


class TestCroftonIdentities:
    def test_mean_chord_disk(self, disk_measure):
        assert disk_measure.mean_chord_length() == pytest.approx(math.pi / 2, abs=1e-9)
        assert disk_measure.mean_chord_quadrature() == pytest.approx(math.pi / 2, abs=1e-6)

    def test_mean_chord_square(self, square_measure):
        assert square_measure.mean_chord_length() == pytest.approx(math.pi / 4, abs=1e-6)

    def test_mean_chord_scales_linearly(self):
        big = EndpointMeasure(make_disk((0, 0), 2.0))
        assert big.mean_chord_length() == pytest.approx(math.pi, rel=1e-9)

    def test_mean_chord_square_monte_carlo(self, unit_square):
        # third route: average chord length of invariant-measure lines
        from chorddisc.geometry import sample_lines

        rng = np.random.default_rng(21)
        phi, p = sample_lines(unit_square, 200_000, rng)
        _, _, w, valid = unit_square.clip_line_params(phi, p)
        w = w[valid]
        est, se = float(w.mean()), float(w.std(ddof=1) / math.sqrt(w.size))
        assert abs(est - math.pi / 4) <= 3 * se

    def test_crossing_mass_diameter(self, unit_disk, disk_measure):
        c = chord_from_params(unit_disk, 0.0, 0.5)
        assert disk_measure.crossing_mass(c) == pytest.approx(2 / math.pi, rel=1e-12)

    def test_crossing_mass_vanishes_with_length(self, disk_measure):
        assert disk_measure.crossing_mass((0.0, 1e-9)) < 1e-8

    def test_crossing_mass_square_diagonal(self, unit_square, square_measure):
        c = chord_from_params(unit_square, 0.0, 0.5)
        assert c.w == pytest.approx(math.sqrt(2), rel=1e-12)
        assert square_measure.crossing_mass(c) == pytest.approx(2 * math.sqrt(2) / 4, rel=1e-12)

    def test_crossing_mass_monte_carlo(self, unit_disk, disk_measure):
        # fraction of measure-random chords crossing a fixed diameter
        ps = ld_sequence_2d(40_000, "pseudorandom", seed=5)
        tr = transport_to_measure(ps, disk_measure)
        s, t = tr.params[:, 0], tr.params[:, 1]
        in_arc_s = (s - 0.0) % 1.0 < 0.5
        in_arc_t = (t - 0.0) % 1.0 < 0.5
        frac = float(np.mean(in_arc_s != in_arc_t))
        p = 2 / math.pi
        se = math.sqrt(p * (1 - p) / 40_000)
        assert abs(frac - p) <= 4 * se

    @pytest.mark.parametrize("measure_name", ["disk_measure", "square_measure"])
    def test_crossing_mass_equals_crossing_set_mass(self, measure_name, request):
        measure = request.getfixturevalue(measure_name)
        rng = np.random.default_rng(31)
        for _ in range(200):
            s, t = rng.random(2)
            if measure.is_degenerate_pair(s, t):
                continue
            direct = measure.crossing_mass((s, t))
            via_rects = measure.crossing_set_mass(s, t)
            assert direct == pytest.approx(via_rects, abs=1e-9)

    def test_quadrature_disagreement_raises(self, disk_measure, monkeypatch):
        monkeypatch.setattr(EndpointMeasure, "mean_chord_quadrature", lambda self: 1.0)
        with pytest.raises(InternalConsistencyError):
            disk_measure.mean_chord_length()


class TestVariation:
    def test_product_function_budget(self):
        # f = x y: corner 1, both faces 1, mixed 1
        grid = np.linspace(0, 1, 257)
        vals = grid[:, None] * grid[None, :]
        budget = hk_variation(vals)
        assert budget.corner == pytest.approx(1.0)
        assert budget.face_s == pytest.approx(1.0, abs=1e-12)
        assert budget.face_t == pytest.approx(1.0, abs=1e-12)
        assert budget.mixed == pytest.approx(1.0, abs=1e-10)
        assert budget.total == pytest.approx(4.0, abs=1e-10)

    def test_constant_function_has_only_corner(self):
        vals = np.full((65, 65), -2.5)
        budget = hk_variation(vals)
        assert budget.total == pytest.approx(2.5)
        assert budget.mixed == 0.0

    def test_chord_length_grid_stable_under_refinement(self, unit_disk):
        v1 = hk_variation(chord_length_grid(unit_disk, 512), diagonal_jump=unit_disk.perimeter)
        v2 = hk_variation(chord_length_grid(unit_disk, 1024), diagonal_jump=unit_disk.perimeter)
        assert abs(v2.total - v1.total) <= 0.01 * v2.total
        # faces 4 + 4, smooth mixed mass 4 pi, diagonal ridge 2 * perimeter
        expected = 8.0 + 4 * math.pi + 2 * unit_disk.perimeter
        assert v2.total == pytest.approx(expected, rel=5e-3)

    def test_too_small_grid_rejected(self):
        with pytest.raises(ValueError):
            hk_variation(np.ones((1, 3)))


class TestKoksma:
    def test_constant_function_trivial(self, disk_measure):
        pts = np.array([[0.2, 0.6], [0.7, 0.1]])
        f = np.full((33, 33), 3.0)
        chk = koksma_gap_check(pts, disk_measure, f, delta=1.0)
        assert isinstance(chk, KoksmaCheck)
        assert chk.lhs <= 1e-9
        assert chk.holds

    def test_transport_points_respect_bound(self, unit_disk, disk_measure):
        ps = ld_sequence_2d(16, "kronecker-fibonacci")
        tr = transport_to_measure(ps, disk_measure)
        f = chord_length_grid(unit_disk, 512)
        chk = koksma_gap_check(tr.params, disk_measure, f, diagonal_jump=unit_disk.perimeter)
        assert chk.holds
        # lhs agrees with the directly computed length gap
        w = 2 * np.abs(np.sin(math.pi * ((tr.params[:, 1] - tr.params[:, 0]) % 1.0)))
        direct = abs(float(w.sum()) - 16 * math.pi / 2)
        assert chk.lhs == pytest.approx(direct, abs=1e-3)

    def test_single_point_at_mass_centroid(self, unit_disk, disk_measure):
        pts = np.array([[0.5, 0.5]])
        f = chord_length_grid(unit_disk, 256)
        chk = koksma_gap_check(pts, disk_measure, f, diagonal_jump=unit_disk.perimeter)
        # the lone point carries f = 0, so the gap is the full mean length
        assert chk.lhs == pytest.approx(math.pi / 2, abs=1e-3)
        assert chk.delta == pytest.approx(1.0, abs=1e-9)
        assert chk.holds
