import numpy as np
import pytest

from temof import (ConfigurationError, DominanceRelation, Population, UsageError,
                   dominates, nondominated_sort, pareto_mask, sort_fronts)


def peel_oracle(f):
    """Reference sorter: re-derive dominance pairwise at every peel."""
    f = np.asarray(f, dtype=float)
    remaining = list(range(len(f)))
    fronts = []
    while remaining:
        front = []
        for i in remaining:
            beaten = False
            for j in remaining:
                if j != i and dominates(f[j], f[i]) is DominanceRelation.FIRST_DOMINATES:
                    beaten = True
                    break
            if not beaten:
                front.append(i)
        fronts.append(np.array(front, dtype=int))
        gone = set(front)
        remaining = [i for i in remaining if i not in gone]
    return fronts


class TestDominates:
    def test_strict(self):
        assert dominates([1, 1], [2, 2]) is DominanceRelation.FIRST_DOMINATES
        assert dominates([2, 2], [1, 1]) is DominanceRelation.SECOND_DOMINATES

    def test_weak_with_one_strict_component(self):
        assert dominates([1, 2], [1, 3]) is DominanceRelation.FIRST_DOMINATES

    def test_equal(self):
        assert dominates([1.5, 2.5], [1.5, 2.5]) is DominanceRelation.EQUAL

    def test_incomparable(self):
        assert dominates([1, 3], [2, 2]) is DominanceRelation.INCOMPARABLE

    def test_shape_mismatch(self):
        with pytest.raises(ConfigurationError):
            dominates([1, 2], [1, 2, 3])
        with pytest.raises(ConfigurationError):
            dominates([[1, 2]], [[1, 2]])


class TestSortFronts:
    def test_hand_case(self):
        f = [[1.0, 1.0], [2.0, 2.0], [1.5, 0.5], [3.0, 3.0]]
        fronts = sort_fronts(f)
        assert [list(fr) for fr in fronts] == [[0, 2], [1], [3]]

    def test_duplicates_share_a_front(self):
        fronts = sort_fronts([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]])
        assert [list(fr) for fr in fronts] == [[0, 1], [2]]

    def test_single_point(self):
        assert list(sort_fronts([[3.0, 4.0]])[0]) == [0]

    def test_all_incomparable(self):
        f = [[0.0, 3.0], [1.0, 2.0], [2.0, 1.0], [3.0, 0.0]]
        assert len(sort_fronts(f)) == 1

    def test_total_order_chain(self):
        f = [[3.0], [1.0], [2.0]]
        fronts = sort_fronts(np.column_stack([f, f]))
        assert [list(fr) for fr in fronts] == [[1], [2], [0]]

    def test_empty_rejected(self):
        with pytest.raises(UsageError):
            sort_fronts(np.empty((0, 2)))

    def test_partition_is_complete_and_disjoint(self):
        rng = np.random.default_rng(5)
        f = rng.random((40, 3))
        fronts = sort_fronts(f)
        joined = np.concatenate(fronts)
        assert sorted(joined) == list(range(40))

    def test_indices_ascending_within_front(self):
        rng = np.random.default_rng(6)
        f = rng.random((60, 3))
        for front in sort_fronts(f):
            assert np.array_equal(front, np.sort(front))

    def test_matches_peel_oracle_on_random_instances(self):
        rng = np.random.default_rng(42)
        for trial in range(30):
            n = int(rng.integers(1, 45))
            m = int(rng.integers(2, 6))
            f = rng.random((n, m))
            if n > 4 and trial % 2:  # inject duplicates and coordinate ties
                f[1] = f[0]
                f[3, 0] = f[2, 0]
            got = sort_fronts(f)
            want = peel_oracle(f)
            assert len(got) == len(want)
            for g, w in zip(got, want):
                assert np.array_equal(np.sort(g), np.sort(w))


class TestNondominatedSort:
    def test_partition_object(self):
        pop = Population(np.zeros((3, 2)),
                         np.array([[1.0, 1.0], [2.0, 2.0], [0.5, 3.0]]))
        part = nondominated_sort(pop)
        assert part.size == 3
        assert list(part.ranks()) == [0, 1, 0]
        assert len(part) == 2

    def test_unevaluated_rejected(self):
        pop = Population.unevaluated(np.zeros((3, 2)), 2)
        with pytest.raises(UsageError):
            nondominated_sort(pop)

    def test_empty_rejected(self):
        pop = Population(np.zeros((1, 2)), np.zeros((1, 2))).take([])
        with pytest.raises(UsageError):
            nondominated_sort(pop)


class TestParetoMask:
    def test_matches_first_front(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            f = rng.random((int(rng.integers(1, 80)), int(rng.integers(2, 5))))
            mask = pareto_mask(f)
            assert np.array_equal(np.flatnonzero(mask), sort_fronts(f)[0])

    def test_duplicates_kept(self):
        f = np.array([[1.0, 2.0], [1.0, 2.0], [3.0, 3.0]])
        assert list(pareto_mask(f)) == [True, True, False]
