import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from creditbackbone.errors import DomainError, NodeNotFound
from creditbackbone.model import (
    AttributeClass,
    AttributeTable,
    EntityId,
    Side,
    Snapshot,
    density,
    density_from_counts,
    node_strength,
)

from .conftest import snap


def test_strength_single_edge(backend):
    s = snap([("B1", "F1", 7.0)])
    assert node_strength(s, EntityId.bank("B1")) == 7.0


def test_strength_sum(backend):
    s = snap([("B1", "F1", 3.0), ("B1", "F2", 2.0), ("B1", "F3", 5.0)])
    assert node_strength(s, EntityId.bank("B1")) == 10.0
    assert s.degree(EntityId.bank("B1")) == 3


def test_strength_unknown_node():
    s = snap([("B1", "F1", 1.0)])
    with pytest.raises(NodeNotFound):
        node_strength(s, EntityId.bank("B9"))
    # same code on the other side is a different entity
    with pytest.raises(NodeNotFound):
        node_strength(s, EntityId.firm("B1"))


@pytest.mark.parametrize(
    "banks, firms, edges, expected",
    [(225, 1414, 27587, 0.0867), (166, 2706, 17885, 0.0398)],
)
def test_density_reported_years(banks, firms, edges, expected):
    assert density_from_counts(banks, firms, edges) == pytest.approx(expected, abs=1e-4)


def test_density_empty_and_small():
    assert density(snap([])) == 0.0
    s = snap([("B1", "F1", 1.0), ("B1", "F2", 1.0), ("B2", "F1", 1.0)])
    assert density(s) == 3 / 4


def test_duplicates_summed_and_zero_dropped():
    s = snap([("B1", "F1", 2.0), ("B1", "F1", 3.0), ("B2", "F1", 0.0)])
    assert s.n_edges == 1
    assert s.weights[0] == 5.0
    assert s.banks == ("B1",)


def test_negative_amount_rejected():
    with pytest.raises(DomainError):
        snap([("B1", "F1", -1.0)])


def test_term_tag_kept_when_uniform():
    s = Snapshot.from_records(2000, [("B1", "F1", 1.0, "short"), ("B1", "F1", 2.0, "short"),
                                     ("B1", "F2", 1.0, "short"), ("B1", "F2", 1.0, "long")])
    assert s.terms == ("short", None)


def test_snapshot_is_read_only():
    s = snap([("B1", "F1", 1.0)])
    with pytest.raises(ValueError):
        s.weights[0] = 2.0
    with pytest.raises(AttributeError):
        s.year = 1


def test_entity_id_rules():
    with pytest.raises(DomainError):
        EntityId(Side.BANK, "")
    assert EntityId("bank", "B1") == EntityId.bank("B1")
    assert EntityId.bank("X") != EntityId.firm("X")


def test_attribute_table_rules():
    b, f = EntityId.bank("B1"), EntityId.firm("F1")
    with pytest.raises(DomainError):
        AttributeTable([(b, AttributeClass.SECTOR, "C")])
    with pytest.raises(DomainError):
        AttributeTable([(f, AttributeClass.SECTOR, "C"), (f, AttributeClass.SECTOR, "RE")])
    t = AttributeTable([(f, AttributeClass.SECTOR, "C"), (f, AttributeClass.LOCATION, "Tokyo"),
                        (b, AttributeClass.BANK_TYPE, "City")])
    assert t.value(f, AttributeClass.SECTOR) == "C"
    assert t.value(f, "location") == "Tokyo"
    assert t.value(b, AttributeClass.BANK_TYPE) == "City"
    assert t.value(EntityId.firm("F9"), AttributeClass.SECTOR) is None


records = st.lists(
    st.tuples(
        st.sampled_from([f"B{i}" for i in range(5)]),
        st.sampled_from([f"F{i}" for i in range(8)]),
        st.floats(min_value=0.01, max_value=1e6, allow_nan=False, allow_infinity=False),
    ),
    min_size=1, max_size=40,
)


@settings(max_examples=80, deadline=None)
@given(records)
def test_strength_conservation_and_normalization(recs):
    s = snap(recs)
    total = s.total_credit
    assert math.isclose(math.fsum(s.bank_strength), total, rel_tol=1e-12)
    assert math.isclose(math.fsum(s.firm_strength), total, rel_tol=1e-12)
    for side_strength, idx in ((s.bank_strength, s.bank_index), (s.firm_strength, s.firm_index)):
        x = s.weights / side_strength[idx]
        assert np.all((x > 0) & (x <= 1))
        sums = np.bincount(idx, weights=x)
        np.testing.assert_allclose(sums, 1.0, atol=1e-12)
    assert np.all(s.bank_degree >= 1) and np.all(s.firm_degree >= 1)


@settings(max_examples=60, deadline=None)
@given(records, st.randoms(use_true_random=False))
def test_construction_order_independent(recs, rnd):
    shuffled = list(recs)
    rnd.shuffle(shuffled)
    assert snap(recs) == snap(shuffled)


def test_order_independence_with_many_duplicates():
    rnd = random.Random(0)
    recs = [("B1", "F1", rnd.random() * 10 ** rnd.randint(-3, 6)) for _ in range(500)]
    ref = snap(recs)
    for _ in range(5):
        rnd.shuffle(recs)
        assert snap(recs).weights[0] == ref.weights[0]
