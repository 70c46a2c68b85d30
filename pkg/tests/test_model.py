import numpy as np
import pytest

from cpsearch import (
    CodeOutOfRangeError,
    Dag,
    ModelError,
    NodeScoreTable,
    RaggedRowError,
    ScoredParentSet,
    ScoreTable,
    check_acyclic,
    validate_dataset,
)
from cpsearch.model import parents_mask, validate_ordering


class TestValidateDataset:
    def test_infers_arities_from_observed_max(self):
        data = validate_dataset([[0, 1], [1, 0]])
        assert data.arities == (2, 2)
        assert data.num_rows == 2

    def test_ragged_row_rejected(self):
        with pytest.raises(RaggedRowError):
            validate_dataset([[0, 1], [0, 1, 2]])

    def test_code_above_declared_arity_rejected(self):
        with pytest.raises(CodeOutOfRangeError):
            validate_dataset([[0, 3]], arities=[2, 2])

    def test_negative_code_rejected(self):
        with pytest.raises(CodeOutOfRangeError):
            validate_dataset([[0, -1]], arities=[2, 2])

    def test_zero_variables_rejected(self):
        with pytest.raises(ModelError):
            validate_dataset([[]])

    def test_empty_rows_need_declared_arities(self):
        data = validate_dataset([], arities=[2, 3])
        assert data.num_rows == 0
        assert data.num_vars == 2
        with pytest.raises(ModelError):
            validate_dataset([])

    def test_declared_arity_may_exceed_observed(self):
        data = validate_dataset([[0, 0]], arities=[4, 2])
        assert data.arities == (4, 2)

    def test_constant_variable_allows_arity_one(self):
        data = validate_dataset([[0, 1], [0, 0]], arities=[1, 2])
        assert data.arities == (1, 2)

    def test_rows_are_read_only(self):
        data = validate_dataset([[0, 1], [1, 0]])
        with pytest.raises(ValueError):
            data.rows[0, 0] = 1

    def test_names_metadata(self):
        data = validate_dataset([[0, 1]], var_names=["a", "b"])
        assert data.var_names == ("a", "b")
        with pytest.raises(ModelError):
            validate_dataset([[0, 1]], var_names=["a"])


class TestCheckAcyclic:
    def test_chain(self):
        assert check_acyclic(Dag(parents=((), (0,), (1,)), score=0.0))

    def test_two_cycle(self):
        assert not check_acyclic(Dag(parents=((1,), (0,)), score=0.0))

    def test_collider(self):
        assert check_acyclic(Dag(parents=((), (), (0, 1)), score=0.0))

    def test_self_loop_rejected_at_construction(self):
        with pytest.raises(ModelError):
            Dag(parents=((0,),), score=0.0)

    def test_three_cycle(self):
        assert not check_acyclic(Dag(parents=((2,), (0,), (1,)), score=0.0))


class TestNodeScoreTable:
    def test_requires_empty_set(self):
        with pytest.raises(ModelError):
            NodeScoreTable(node=0, entries=(ScoredParentSet((1,), -1.0),))

    def test_rejects_duplicate_empty_set(self):
        with pytest.raises(ModelError):
            NodeScoreTable(
                node=0,
                entries=(ScoredParentSet((), -1.0), ScoredParentSet((), -2.0)),
            )

    def test_rejects_self_parent(self):
        with pytest.raises(ModelError):
            NodeScoreTable(
                node=1,
                entries=(ScoredParentSet((1,), -1.0), ScoredParentSet((), -2.0)),
            )

    def test_rejects_wrong_order(self):
        with pytest.raises(ModelError):
            NodeScoreTable(
                node=0,
                entries=(ScoredParentSet((), -3.0), ScoredParentSet((1,), -1.0)),
            )

    def test_equal_scores_break_ties_lexicographically(self):
        table = NodeScoreTable(
            node=0,
            entries=(
                ScoredParentSet((1,), -1.0),
                ScoredParentSet((1, 2), -1.0),
                ScoredParentSet((2,), -1.0),
                ScoredParentSet((), -2.0),
            ),
        )
        assert [e.parents for e in table.entries] == [(1,), (1, 2), (2,), ()]
        with pytest.raises(ModelError):
            NodeScoreTable(
                node=0,
                entries=(
                    ScoredParentSet((2,), -1.0),
                    ScoredParentSet((1,), -1.0),
                    ScoredParentSet((), -2.0),
                ),
            )

    def test_non_finite_score_rejected(self):
        with pytest.raises(ModelError):
            ScoredParentSet((), float("nan"))
        with pytest.raises(ModelError):
            ScoredParentSet((1,), float("-inf"))

    def test_masks_align_with_entries(self):
        table = NodeScoreTable(
            node=0,
            entries=(ScoredParentSet((1, 3), -1.0), ScoredParentSet((), -2.0)),
        )
        assert table.masks() == (parents_mask((1, 3)), 0)

    def test_best_consistent_index_prefers_rank(self):
        table = NodeScoreTable(
            node=0,
            entries=(
                ScoredParentSet((1, 2), -1.0),
                ScoredParentSet((2,), -1.5),
                ScoredParentSet((), -2.0),
            ),
        )
        assert table.best_consistent_index(parents_mask((1, 2))) == 0
        assert table.best_consistent_index(parents_mask((2,))) == 1
        assert table.best_consistent_index(0) == 2


class TestScoreTable:
    def test_node_index_alignment_enforced(self):
        good = NodeScoreTable(node=0, entries=(ScoredParentSet((), -1.0),))
        with pytest.raises(ModelError):
            ScoreTable(tables=(good, good))

    def test_parent_indices_must_be_in_range(self):
        t0 = NodeScoreTable(
            node=0,
            entries=(ScoredParentSet((5,), -1.0), ScoredParentSet((), -2.0)),
        )
        t1 = NodeScoreTable(node=1, entries=(ScoredParentSet((), -1.0),))
        with pytest.raises(ModelError):
            ScoreTable(tables=(t0, t1))


class TestOrdering:
    def test_validate_ordering(self):
        validate_ordering((2, 0, 1), 3)
        with pytest.raises(ModelError):
            validate_ordering((0, 0, 1), 3)
        with pytest.raises(ModelError):
            validate_ordering((0, 1), 3)


def test_large_index_masks_use_python_ints():
    # Parent indices beyond 63 bits must still scan correctly.
    table = NodeScoreTable(
        node=0,
        entries=(ScoredParentSet((70,), -1.0), ScoredParentSet((), -2.0)),
    )
    assert table.best_consistent_index(1 << 70) == 0
    assert table.best_consistent_index(0) == 1
