import math

import numpy as np
import pytest

from temof import (ConfigurationError, NormalizationState, Nsga3Base, Population,
                   ReferencePointSet, UsageError, associate, das_dennis,
                   environmental_selection, first_front_selection, make_problem,
                   normalize, nsga3_run, reference_points_for, rng_stream,
                   sort_fronts)
from temof.nsga3 import choose_divisions


class TestDasDennis:
    def test_two_objective_four_divisions(self):
        pts = das_dennis(2, 4).points
        expected = [[0.0, 1.0], [0.25, 0.75], [0.5, 0.5], [0.75, 0.25], [1.0, 0.0]]
        assert np.allclose(pts, expected)

    def test_three_objective_twelve_divisions(self):
        refs = das_dennis(3, 12)
        assert len(refs) == 91
        assert np.all(np.abs(refs.points.sum(axis=1) - 1.0) <= 1e-9)
        assert (refs.points >= 0).all()

    def test_count_matches_binomial(self):
        for m in range(2, 6):
            for h in range(1, 7):
                assert len(das_dennis(m, h)) == math.comb(h + m - 1, m - 1)

    def test_rows_unique(self):
        pts = das_dennis(4, 6).points
        assert len(np.unique(pts, axis=0)) == len(pts)

    def test_lattice_coordinates(self):
        h = 5
        pts = das_dennis(3, h).points
        scaled = pts * h
        assert np.allclose(scaled, np.round(scaled), atol=1e-12)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            das_dennis(1, 4)
        with pytest.raises(ConfigurationError):
            das_dennis(3, 0)
        with pytest.raises(ConfigurationError, match="limit"):
            das_dennis(7, 40)


class TestChooseDivisions:
    def test_largest_fitting_lattice(self):
        for m, cap in [(2, 100), (3, 92), (3, 100), (3, 91), (5, 210), (4, 120)]:
            h = choose_divisions(m, cap)
            assert math.comb(h + m - 1, m - 1) <= cap or h == 1
            assert math.comb(h + m, m - 1) > cap

    def test_reference_points_for(self):
        refs = reference_points_for(92, 3)
        assert len(refs) == 91
        refs = reference_points_for(100, 3)
        assert len(refs) == 91
        # cap below the minimal lattice still yields one division
        assert len(reference_points_for(2, 3)) == 3


class TestNormalize:
    def test_hand_case_intercepts(self):
        state = NormalizationState()
        normalized, state = normalize(np.array([[1.0, 2.0], [3.0, 0.0]]), state)
        assert np.allclose(state.ideal, [1.0, 0.0])
        assert np.allclose(state.intercepts, [2.0, 2.0])
        assert np.allclose(normalized, [[0.0, 1.0], [1.0, 0.0]])

    def test_ideal_only_decreases(self):
        state = NormalizationState()
        normalize(np.array([[1.0, 2.0], [3.0, 0.0]]), state)
        normalize(np.array([[5.0, 5.0], [6.0, 4.0]]), state)
        assert np.allclose(state.ideal, [1.0, 0.0])
        normalize(np.array([[0.5, 5.0], [6.0, -1.0]]), state)
        assert np.allclose(state.ideal, [0.5, -1.0])

    def test_rank_deficient_falls_back_to_range(self):
        state = NormalizationState()
        objs = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        normalized, state = normalize(objs, state)
        # extremes coincide, so the scale is max - ideal = (2, 2)
        assert np.allclose(state.intercepts, [2.0, 2.0])
        assert np.allclose(normalized[-1], [1.0, 1.0])

    def test_degenerate_set_floors_the_scale(self):
        state = NormalizationState()
        normalized, state = normalize(np.array([[2.0, 2.0], [2.0, 2.0]]), state)
        assert np.all(state.intercepts == 1e-12)
        assert np.all(normalized == 0.0)

    def test_empty_rejected(self):
        with pytest.raises(UsageError):
            normalize(np.empty((0, 3)), NormalizationState())


class TestAssociate:
    def test_hand_case(self):
        refs = ReferencePointSet(np.array([[1.0, 0.0], [0.0, 1.0]]))
        idx, dist = associate(np.array([[0.9, 0.1]]), refs)
        assert idx[0] == 0
        assert np.isclose(dist[0], 0.1)

    def test_tie_goes_to_lowest_index(self):
        refs = ReferencePointSet(np.array([[1.0, 0.0], [0.0, 1.0]]))
        idx, _ = associate(np.array([[0.5, 0.5]]), refs)
        assert idx[0] == 0

    def test_point_on_ray_has_zero_distance(self):
        refs = das_dennis(3, 4)
        pts = 0.7 * refs.points[5][None, :]
        idx, dist = associate(pts, refs)
        assert idx[0] == 5 and dist[0] < 1e-12

    def test_matches_direct_computation(self):
        rng = np.random.default_rng(9)
        refs = das_dennis(3, 6)
        pts = rng.random((25, 3))
        idx, dist = associate(pts, refs)
        unit = refs.points / np.linalg.norm(refs.points, axis=1, keepdims=True)
        for i, p in enumerate(pts):
            perp = [np.linalg.norm(p - (p @ w) * w) for w in unit]
            assert idx[i] == int(np.argmin(perp))
            assert np.isclose(dist[i], min(perp), atol=1e-10)

    def test_dimension_mismatch(self):
        refs = das_dennis(3, 2)
        with pytest.raises(UsageError):
            associate(np.zeros((2, 2)), refs)


def _evaluated(f):
    f = np.asarray(f, dtype=float)
    return Population(np.zeros((len(f), 2)), f)


class TestEnvironmentalSelection:
    def test_small_population_passes_through(self):
        refs = das_dennis(2, 4)
        state = NormalizationState()
        pop = _evaluated([[1.0, 2.0], [2.0, 1.0]])
        out = environmental_selection(pop, 5, refs, state, np.random.default_rng(0))
        assert len(out) == 2
        assert state.ideal is not None  # state still advances

    def test_whole_fronts_kept_before_critical(self):
        rng = np.random.default_rng(33)
        f = rng.random((50, 3))
        pop = Population(np.zeros((50, 3)), f)
        refs = das_dennis(3, 5)
        out = environmental_selection(pop, 20, refs, NormalizationState(), rng)
        assert len(out) == 20
        ranks_all = {tuple(row): r for r, front in enumerate(sort_fronts(f))
                     for row in f[front]}
        out_ranks = [ranks_all[tuple(row)] for row in out.objectives]
        # ranks are non-decreasing and all better fronts are fully included
        assert out_ranks == sorted(out_ranks)
        worst = max(out_ranks)
        for r, front in enumerate(sort_fronts(f)):
            if r < worst:
                assert sum(1 for x in out_ranks if x == r) == front.size

    def test_empty_niche_takes_closest_member(self):
        refs = das_dennis(2, 1)  # rays (0,1) and (1,0)
        pts = np.array([[0.8, 0.2], [0.75, 0.25], [0.2, 0.8], [0.18, 0.82]])
        pop = _evaluated(pts)
        for seed in range(5):  # RNG only affects the order niches are visited
            out = first_front_selection(pop, 2, refs, NormalizationState(),
                                        np.random.default_rng(seed))
            chosen = {tuple(row) for row in out.objectives}
            assert chosen == {(0.8, 0.2), (0.18, 0.82)}

    def test_selection_count_never_exceeds_n(self):
        rng = np.random.default_rng(4)
        pop = Population(np.zeros((37, 3)), rng.random((37, 3)))
        refs = das_dennis(3, 4)
        for n in (1, 5, 36, 37):
            out = environmental_selection(pop, n, refs, NormalizationState(), rng)
            assert len(out) == min(n, 37)

    def test_unevaluated_rejected(self):
        pop = Population.unevaluated(np.zeros((3, 2)), 2)
        with pytest.raises(UsageError):
            environmental_selection(pop, 2, das_dennis(2, 2),
                                    NormalizationState(), np.random.default_rng(0))

    def test_determinism(self):
        rng = np.random.default_rng(10)
        f = rng.random((60, 3))
        pop = Population(np.zeros((60, 3)), f)
        refs = das_dennis(3, 6)
        a = environmental_selection(pop, 25, refs, NormalizationState(),
                                    np.random.default_rng(77))
        b = environmental_selection(pop, 25, refs, NormalizationState(),
                                    np.random.default_rng(77))
        assert np.array_equal(a.f, b.f)


class TestFirstFrontSelection:
    def test_keeps_only_first_front(self):
        pop = _evaluated([[1.0, 1.0], [0.5, 2.0], [2.0, 2.0], [3.0, 0.1]])
        out = first_front_selection(pop, 10, das_dennis(2, 3),
                                    NormalizationState(), np.random.default_rng(0))
        assert len(out) == 3  # (2,2) is dominated, the rest are front 0
        assert {tuple(r) for r in out.objectives} == {(1.0, 1.0), (0.5, 2.0), (3.0, 0.1)}

    def test_truncates_large_front_to_n(self):
        rng = np.random.default_rng(3)
        theta = rng.random(40) * np.pi / 2
        f = np.column_stack([np.cos(theta), np.sin(theta)])
        out = first_front_selection(Population(np.zeros((40, 2)), f), 12,
                                    das_dennis(2, 11), NormalizationState(), rng)
        assert len(out) == 12

    def test_result_mutually_nondominated(self):
        rng = np.random.default_rng(8)
        f = rng.random((50, 3))
        out = first_front_selection(Population(np.zeros((50, 3)), f), 20,
                                    das_dennis(3, 4), NormalizationState(), rng)
        assert len(sort_fronts(out.objectives)) == 1


class TestNsga3Base:
    def test_reference_count_within_population_size(self):
        problem = make_problem("DTLZ2")
        base = Nsga3Base(problem, 100, rng_stream(0, 0, "selection"))
        assert len(base.refs) == 91

    def test_population_below_objectives_rejected(self):
        problem = make_problem("DTLZ2", n_obj=5, n_var=9)
        with pytest.raises(ConfigurationError):
            Nsga3Base(problem, 3, rng_stream(0, 0, "selection"))


class TestNsga3Run:
    def test_budget_accounting(self):
        problem = make_problem("ZDT1", n_var=6)
        pop, fes = nsga3_run(problem, 20, 100, 0)
        # init 20, then offspring batches of 20 while fes <= 100
        assert fes == 120
        assert len(pop) == 20

    def test_budget_below_population_rejected(self):
        with pytest.raises(ConfigurationError):
            nsga3_run(make_problem("ZDT1"), 50, 40, 0)

    def test_deterministic_for_seed(self):
        problem = make_problem("DTLZ2", n_var=7)
        a, _ = nsga3_run(problem, 12, 300, 5)
        b, _ = nsga3_run(problem, 12, 300, 5)
        assert np.array_equal(a.x, b.x)
        c, _ = nsga3_run(problem, 12, 300, 6)
        assert not np.array_equal(a.x, c.x)

    def test_observer_sees_every_generation(self):
        problem = make_problem("ZDT1", n_var=5)
        seen = []
        nsga3_run(problem, 10, 50, 0,
                  observer=lambda gen, fes, pop: seen.append((gen, fes, len(pop))))
        assert [g for g, _, _ in seen] == list(range(1, len(seen) + 1))
        assert all(size == 10 for _, _, size in seen)
        assert seen[-1][1] == 60
