import math
import os
import tempfile

import numpy as np
import pytest

from chorddisc import ChordSet, GeometryError, make_disk
from chorddisc.buffon import counts_for_arcs, exact_discrepancy, mc_discrepancy
from chorddisc.chordmeasure import EndpointMeasure, chord_length_grid, hk_variation
from chorddisc.construct import (
    BuildRecipe,
    build_direction_lattice,
    build_from_recipe,
    build_random,
    build_to_length,
    build_transport,
    correct_length,
    usable_chord_length,
)
from chorddisc.harness import save_chordset
from chorddisc.lowdisc import rect_discrepancy


class TestTransportBuild:
    def test_digital_pair_contains_antipodal_chord(self, unit_disk):
        cs = build_transport(unit_disk, 2, gen="digital-base2", record_discrepancy=False)
        gaps = [(c.t - c.s) % 1.0 for c in cs.chords]
        # the (1/2, 1/2) input maps to the antipodal gap
        assert any(g == pytest.approx(0.5, abs=1e-12) for g in gaps)
        # the degenerate (0, 0) input was nudged off the diagonal
        assert cs.meta["perturbations"]

    def test_same_seed_bit_identical(self, unit_disk):
        a = build_transport(unit_disk, 64, seed=7, scramble=True)
        b = build_transport(unit_disk, 64, seed=7, scramble=True)
        assert [(c.s, c.t, c.w) for c in a.chords] == [(c.s, c.t, c.w) for c in b.chords]
        with tempfile.TemporaryDirectory() as d:
            pa, pb = os.path.join(d, "a.json"), os.path.join(d, "b.json")
            save_chordset(a, pa)
            save_chordset(b, pb)
            assert open(pa, "rb").read() == open(pb, "rb").read()

    def test_needs_two_chords(self, unit_disk):
        with pytest.raises(GeometryError):
            build_transport(unit_disk, 1)

    @pytest.mark.parametrize("n", [64, 256, 1024])
    def test_length_tracks_mean_chord_via_variation_budget(self, unit_disk, disk_measure, n):
        # |L - N * mean| is controlled by the measured all-rectangle
        # discrepancy times the measured variation of the length function
        cs = build_transport(unit_disk, n, record_discrepancy=False)
        params = np.stack([cs.s_params, cs.t_params], axis=1)
        delta = rect_discrepancy(params, disk_measure, family="all").value
        budget = hk_variation(chord_length_grid(unit_disk, 512),
                              diagonal_jump=unit_disk.perimeter).total
        gap = abs(cs.L - n * math.pi / 2)
        assert gap <= budget * delta + 1e-6 * n

    def test_records_rect_discrepancy(self, unit_disk, disk_measure):
        cs = build_transport(unit_disk, 128)
        params = np.stack([cs.s_params, cs.t_params], axis=1)
        expect = rect_discrepancy(params, disk_measure, family="anchored").value
        assert cs.meta["rect_delta_anchored"] == pytest.approx(expect, abs=1e-12)


class TestRandomBuild:
    def test_mean_chord_length_statistics(self, unit_disk):
        cs = build_random(unit_disk, 10_000, seed=4)
        mean = cs.L / cs.n_chords
        # chord length has variance pi^2/2 + ... bounded by diameter^2
        se = 2.0 / math.sqrt(cs.n_chords)
        assert abs(mean - math.pi / 2) <= 3 * se

    def test_single_chord(self, unit_disk):
        cs = build_random(unit_disk, 1, seed=0)
        assert cs.n_chords == 1
        assert cs.chords[0].w > 0

    def test_seeds_differ(self, unit_disk):
        a = build_random(unit_disk, 16, seed=0)
        b = build_random(unit_disk, 16, seed=1)
        assert [(c.s, c.t) for c in a.chords] != [(c.s, c.t) for c in b.chords]


class TestDirectionLattice:
    def test_single_centered_diameter(self, unit_disk):
        cs = build_direction_lattice(unit_disk, 1, 1)
        assert cs.n_chords == 1
        assert cs.L == pytest.approx(2.0, abs=1e-12)

    def test_two_perpendicular_diameters(self, unit_disk):
        cs = build_direction_lattice(unit_disk, 2, 1)
        assert cs.n_chords == 2
        assert cs.L == pytest.approx(4.0, abs=1e-12)
        # no test line meets more than two chords
        rng = np.random.default_rng(2)
        arcs = np.sort(rng.random((500, 2)), axis=1)
        counts = counts_for_arcs(cs, arcs[:, 0], arcs[:, 1])
        assert counts.max() <= 2

    def test_random_shift_reproducible(self, unit_square):
        a = build_direction_lattice(unit_square, 4, 4, shift="random", seed=9)
        b = build_direction_lattice(unit_square, 4, 4, shift="random", seed=9)
        assert [(c.s, c.t) for c in a.chords] == [(c.s, c.t) for c in b.chords]

    @pytest.mark.xfail(
        strict=True,
        reason="the centered 32x32 offset lattice on the disk measures D ~ 7.5 at"
               " L ~ 1600, below any transport build at desk scale; its polynomial"
               " growth only overtakes the transport's polylog growth far beyond"
               " these sizes (see the growth-contrast test below)",
    )
    def test_lattice_loses_to_transport_at_equal_length(self, unit_disk):
        lattice = build_direction_lattice(unit_disk, 32, 32)
        transported = build_to_length(unit_disk, lattice.L)
        assert transported.L == pytest.approx(lattice.L, rel=1e-12)
        d_lattice = exact_discrepancy(lattice).value
        d_transport = exact_discrepancy(transported).value
        assert d_lattice > d_transport

    def test_lattice_growth_is_polynomial(self, unit_disk):
        # the offset-lattice discrepancy keeps growing like a power of L,
        # roughly quadrupling the size multiplies D by ~ L_ratio^(1/3)
        small = build_direction_lattice(unit_disk, 16, 16)
        large = build_direction_lattice(unit_disk, 64, 64)
        d_small = exact_discrepancy(small).value
        d_large = exact_discrepancy(large).value
        ratio = large.L / small.L
        assert d_large >= d_small * ratio**0.25


class TestCorrectLength:
    def test_disk_decomposition_example(self, unit_disk):
        base = ChordSet(unit_disk, [])
        out, rep = correct_length(unit_disk, base, 5.0)
        assert [round(c.w, 12) for c in rep.added] == [2.0, 2.0, 1.0]
        offsets = []
        for c in rep.added:
            a = np.asarray(unit_disk.boundary_point(c.s))
            b = np.asarray(unit_disk.boundary_point(c.t))
            offsets.append(float(np.linalg.norm(0.5 * (a + b))))
        assert offsets[0] == pytest.approx(0.0, abs=1e-12)
        assert offsets[1] == pytest.approx(0.0, abs=1e-12)
        assert offsets[2] == pytest.approx(math.sqrt(3) / 2, rel=1e-9)
        assert out.L == pytest.approx(5.0, abs=5e-13)

    def test_zero_gap_adds_nothing(self, unit_disk):
        base = build_random(unit_disk, 5, seed=1)
        out, rep = correct_length(unit_disk, base, base.L)
        assert rep.count == 0
        assert out.L == base.L

    def test_target_below_current_rejected(self, unit_disk):
        base = build_random(unit_disk, 5, seed=1)
        with pytest.raises(GeometryError):
            correct_length(unit_disk, base, base.L - 1.0)

    @pytest.mark.parametrize("body_name", ["unit_disk", "unit_square", "hexagon"])
    def test_random_cases_hit_target_within_budget(self, body_name, request):
        body = request.getfixturevalue(body_name)
        rng = np.random.default_rng(33)
        d, _ = usable_chord_length(body)
        for trial in range(25):
            base = build_random(body, int(rng.integers(1, 40)), seed=trial)
            target = base.L + float(rng.uniform(0.0, 8.0))
            out, rep = correct_length(body, base, target)
            assert abs(out.L - target) <= 1e-12 * target
            assert rep.count <= rep.delta / d + 1 + 1e-9

    def test_line_counts_increase_by_at_most_added(self, unit_disk):
        base = build_random(unit_disk, 20, seed=5)
        out, rep = correct_length(unit_disk, base, base.L + 5.0)
        rng = np.random.default_rng(6)
        arcs = np.sort(rng.random((2000, 2)), axis=1)
        before = counts_for_arcs(base, arcs[:, 0], arcs[:, 1])
        after = counts_for_arcs(out, arcs[:, 0], arcs[:, 1])
        assert np.all(after - before >= 0)
        assert np.all(after - before <= rep.count)

    def test_exact_discrepancy_still_sound_after_correction(self, unit_disk):
        base = build_random(unit_disk, 10, seed=8)
        out, _ = correct_length(unit_disk, base, base.L + 3.0)
        ex = exact_discrepancy(out).value
        mc = mc_discrepancy(out, 20_000, seed=8).value
        assert ex >= mc - 1e-12


class TestRecipe:
    def test_recipe_roundtrip_dispatch(self, unit_disk):
        cs = build_from_recipe(unit_disk, BuildRecipe(method="transport", n=32))
        assert cs.n_chords == 32
        cs = build_from_recipe(unit_disk, BuildRecipe(method="direction-lattice", m=2, k=2))
        assert cs.meta["method"] == "direction-lattice"

    def test_recipe_with_target_length(self, unit_disk):
        cs = build_from_recipe(unit_disk, BuildRecipe(method="transport", n=16, target_length=40.0))
        assert cs.L == pytest.approx(40.0, abs=4e-11)

    def test_invalid_recipes_rejected(self):
        with pytest.raises(ValueError):
            BuildRecipe(method="greedy", n=4)
        with pytest.raises(ValueError):
            BuildRecipe(method="transport", n=0)
        with pytest.raises(ValueError):
            BuildRecipe(method="direction-lattice", m=1, k=0)
