"""
Property Tests
==============
Randomized checks of the ideal algebra against brute-force membership, of
principalization soundness, and of the per-stage conditions of the
collection simplifier.

Run: pytest tests/test_properties.py -v

A run that trips the step guard, or whose global defect rises between
steps, is written to the counterexamples directory and fails the test.
"""

import hashlib
import json
import sys
import tempfile
from itertools import product as box_points
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import pytest
from hypothesis import given, settings, strategies as st

from engine.charts import new_root
from engine.equivariance import GroupElement, act_on_ideal, closure
from engine.errors import TerminationGuardError
from engine.monomials import (
    MonomialIdeal,
    colon,
    ideal_sum,
    intersect,
    is_locally_principal,
    membership,
    minimalize,
)
from engine.principalizer import principalize
from engine.settings import get_settings
from engine.simplifier import simplify_collection

COUNTEREXAMPLES = Path(tempfile.gettempdir()) / "equiblow-counterexamples"


def _archive(kind: str, payload: dict, detail: dict) -> Path:
    COUNTEREXAMPLES.mkdir(parents=True, exist_ok=True)
    digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()[:16]
    path = COUNTEREXAMPLES / f"{kind}-{digest}.json"
    path.write_text(json.dumps({**payload, "detail": detail}, indent=2, sort_keys=True))
    return path


def _fail_with_counterexample(kind: str, payload: dict, detail: dict):
    path = _archive(kind, payload, detail)
    pytest.fail(f"{kind} counterexample archived at {path}")


def exponent_vectors(arity: int, max_exponent: int, max_degree=None):
    vectors = st.tuples(*[st.integers(0, max_exponent)] * arity)
    if max_degree is not None:
        vectors = vectors.filter(lambda m: sum(m) <= max_degree)
    return vectors


def ideals(arity: int, max_exponent: int = 4, max_degree=None):
    return st.lists(exponent_vectors(arity, max_exponent, max_degree), min_size=1, max_size=4).map(minimalize)


@st.composite
def ideal_pairs(draw):
    n = draw(st.integers(1, 3))
    return draw(ideals(n)), draw(ideals(n))


# ═══════════════════════════════════════════
# Ideal algebra against brute-force membership
# ═══════════════════════════════════════════

@settings(max_examples=1000, deadline=None)
@given(ideal_pairs())
def test_operations_match_membership_oracle(pair):
    """Sum, intersection and colon agree with membership in a finite box."""
    I, J = pair
    total, common, conductor = ideal_sum(I, J), intersect(I, J), colon(I, J)
    bound = get_settings().oracle_box
    for m in box_points(range(bound + 1), repeat=I.arity):
        in_i, in_j = membership(m, I), membership(m, J)
        assert membership(m, total) == (in_i or in_j)
        assert membership(m, common) == (in_i and in_j)
        assert membership(m, conductor) == all(
            membership(tuple(a + b for a, b in zip(m, f)), I) for f in J.generators
        )


@settings(max_examples=200, deadline=None)
@given(ideal_pairs())
def test_generators_are_minimal_and_canonical(pair):
    """Generators are irredundant and their order is canonical."""
    for ideal in (pair[0], intersect(*pair)):
        gens = ideal.generators
        assert MonomialIdeal.of(*reversed(gens)) == ideal
        for a in gens:
            assert not any(b != a and membership(a, MonomialIdeal(ideal.arity, (b,))) for b in gens)


# ═══════════════════════════════════════════
# Principalizer soundness
# ═══════════════════════════════════════════

@st.composite
def small_ideals(draw):
    n = draw(st.integers(1, 3))
    return draw(ideals(n, max_exponent=5, max_degree=5))


@settings(max_examples=200, deadline=None)
@given(small_ideals())
def test_principalizer_soundness(ideal):
    """Random ideals become principal on every leaf without a guard trip or defect increase."""
    tower = new_root(ideal.arity)
    payload = {"ideal": ideal.to_json()}
    try:
        result = principalize(tower, ideal, max_steps=50)
    except TerminationGuardError as e:
        _fail_with_counterexample("principalize-guard", payload, e.to_dict())
    if result.defect_increases:
        _fail_with_counterexample("principalize-defect", payload, result.to_json())
    for leaf in tower.leaves():
        pulled = tower.total_transform(leaf, ideal)
        assert is_locally_principal(pulled)
        assert pulled.generators[0] == result.generators[leaf]


# ═══════════════════════════════════════════
# Collection simplifier stage conditions
# ═══════════════════════════════════════════

CYCLE = GroupElement.from_json({"vars": [2, 3, 1]})


@st.composite
def collections(draw):
    """Either up to three unrelated ideals, or the orbit of one ideal under the 3-cycle."""
    if draw(st.booleans()):
        return draw(st.lists(ideals(3, max_exponent=3), min_size=1, max_size=3)), None
    seed = draw(ideals(3, max_exponent=3))
    group = closure([CYCLE], 3)
    orbit = [seed]
    for _ in range(2):
        orbit.append(act_on_ideal(CYCLE, orbit[-1]))
    return orbit, group


@settings(max_examples=100, deadline=None)
@given(collections())
def test_stage_conditions_hold(case):
    """Every stage runs, meets its exit condition and keeps the global defect from rising."""
    collection, group = case
    payload = {"collection": [I.to_json() for I in collection], "cyclic": group is not None}
    try:
        result = simplify_collection(collection, group, max_steps=50, stop_when_principal=False)
    except TerminationGuardError as e:
        _fail_with_counterexample("simplify-guard", payload, e.to_dict())
    rising = {s.i: s.defect_increases for s in result.stages if s.defect_increases}
    if rising:
        _fail_with_counterexample("simplify-defect", payload, {"defect_increases": rising})

    assert [s.i for s in result.stages] == list(range(len(collection) + 1, 1, -1))
    for stage in result.stages:
        assert stage.exit_witnesses == []
        assert stage.stalk_formula
    for pullbacks in result.leaf_pullbacks().values():
        assert all(is_locally_principal(I) for I in pullbacks)


# ═══════════════════════════════════════════
# Counterexample archive
# ═══════════════════════════════════════════

def test_guard_trip_fails_and_is_archived(tmp_path, monkeypatch):
    """An archived counterexample fails the test instead of being skipped."""
    monkeypatch.setattr(sys.modules[__name__], "COUNTEREXAMPLES", tmp_path)
    with pytest.raises(pytest.fail.Exception):
        _fail_with_counterexample("principalize-guard", {"ideal": [[1, 0]]}, {"code": "termination_guard"})
    assert len(list(tmp_path.glob("principalize-guard-*.json"))) == 1


def test_archive_names_are_reproducible(tmp_path, monkeypatch):
    """The same payload always lands in the same file."""
    monkeypatch.setattr(sys.modules[__name__], "COUNTEREXAMPLES", tmp_path)
    first = _archive("simplify-defect", {"collection": [[[1, 0]]]}, {})
    second = _archive("simplify-defect", {"collection": [[[1, 0]]]}, {"again": True})
    assert first == second
    assert first.name == "simplify-defect-" + hashlib.sha256(b'{"collection": [[[1, 0]]]}').hexdigest()[:16] + ".json"
