"""
Unit Tests for the Principalizer
=================================
Run: pytest tests/test_principalizer.py -v
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import pytest

from engine.charts import new_root
from engine.equivariance import GroupElement, closure, transport_all
from engine.errors import NothingToDoError, TerminationGuardError
from engine.monomials import MonomialIdeal, is_locally_principal
from engine.principalizer import pair_invariants, principalize, select_step


def _principal_everywhere(tower, ideal):
    return all(is_locally_principal(tower.total_transform(leaf, ideal)) for leaf in tower.leaves())


# ═══════════════════════════════════════════
# Invariants
# ═══════════════════════════════════════════

def test_pair_invariants_of_maximal_ideal():
    """(x, y) has order 1 along {x, y}."""
    row = pair_invariants(MonomialIdeal.of((1, 0), (0, 1)))
    assert row.nu == {(0, 1): 1}
    assert row.center_order == (2, 1)
    assert row.tied_subsets == ((0, 1),)


def test_pair_invariants_ignore_common_factor():
    """A common monomial factor does not change the invariants."""
    row = pair_invariants(MonomialIdeal.of((3, 1), (2, 2)))
    assert row.nu == {(0, 1): 1}


def test_principal_ideal_has_no_center():
    """Principal ideals have zero chart defect."""
    row = pair_invariants(MonomialIdeal.of((2, 5)))
    assert row.is_principal
    assert row.chart_defect == 0


def test_higher_codimension_fallback():
    """(x, y, z) has no pairwise defect but needs the codimension-3 center."""
    row = pair_invariants(MonomialIdeal.of((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert row.chart_defect == 0
    assert row.center_order == (3, 1)
    assert row.tied_subsets == ((0, 1, 2),)


def test_select_step_rejects_principal_ideal():
    """Nothing to blow up for a principal ideal."""
    with pytest.raises(NothingToDoError):
        select_step(new_root(2), MonomialIdeal.of((1, 1)))


def test_first_center_is_the_origin():
    """The cusp ideal's first center is the origin with order 2."""
    step = select_step(new_root(2), MonomialIdeal.of((2, 0), (0, 3)))
    assert step.to_json() == {"centers": [{"chart": 0, "center": [1, 2]}], "orbit_tag": "codim2:nu=2:{1,2}"}


# ═══════════════════════════════════════════
# Principalization
# ═══════════════════════════════════════════

def test_principalize_maximal_ideal_in_one_step():
    """One blowup principalizes (x, y)."""
    tower = new_root(2)
    ideal = MonomialIdeal.of((1, 0), (0, 1))
    result = principalize(tower, ideal)
    assert result.steps_taken == 1
    assert tower.leaves() == [1, 2]
    assert result.generators == {1: (1, 0), 2: (0, 1)}
    assert result.defect_trace == [1, 0]


def test_principalize_cusp_ideal():
    """(x^2, y^3) ends principal without defect increases."""
    tower = new_root(2)
    ideal = MonomialIdeal.of((2, 0), (0, 3))
    result = principalize(tower, ideal)
    assert _principal_everywhere(tower, ideal)
    assert result.defect_increases == []


def test_principalize_three_variables():
    """(x, yz) ends principal in three variables."""
    tower = new_root(3)
    ideal = MonomialIdeal.of((1, 0, 0), (0, 1, 1))
    principalize(tower, ideal)
    assert _principal_everywhere(tower, ideal)


def test_principal_ideal_needs_no_steps():
    """A principal ideal leaves the root alone."""
    tower = new_root(2)
    result = principalize(tower, MonomialIdeal.of((3, 1)))
    assert result.steps_taken == 0
    assert tower.leaves() == [0]


def test_normal_crossing_certificates():
    """Leaf generators come with their exceptional support."""
    tower = new_root(2)
    result = principalize(tower, MonomialIdeal.of((1, 0), (0, 1)))
    assert result.normal_crossings[1] == {
        "generator": [1, 0],
        "exceptional_support": [1],
        "coordinate_support": [],
        "normal_crossing": True,
    }


def test_termination_guard_carries_trace():
    """The guard error keeps the invariant trace."""
    tower = new_root(2)
    with pytest.raises(TerminationGuardError) as info:
        principalize(tower, MonomialIdeal.of((3, 0), (0, 5)), max_steps=1)
    assert info.value.exit_code == 2
    assert info.value.trace and info.value.trace[0]["step"] == 0


# ═══════════════════════════════════════════
# Equivariance
# ═══════════════════════════════════════════

def test_separation_center_for_fixed_chart():
    # (x, yz) with y ↔ z: the tied pairs {x,y} and {x,z} are swapped by the
    # stabilizer of the root, so the origin is blown up first
    group = closure([GroupElement.from_json({"vars": [1, 3, 2]})], 3)
    tower = new_root(3)
    step = select_step(tower, MonomialIdeal.of((1, 0, 0), (0, 1, 1)), group)
    assert step.centers == ((0, frozenset({0, 1, 2})),)
    assert step.orbit_tag.startswith("separation:nu=1:")


def test_equivariant_principalization_lifts_the_group():
    """The tower for (x, yz) carries the y ↔ z action."""
    group = closure([GroupElement.from_json({"vars": [1, 3, 2]})], 3)
    tower = new_root(3)
    ideal = MonomialIdeal.of((1, 0, 0), (0, 1, 1))
    principalize(tower, ideal, group)
    assert _principal_everywhere(tower, ideal)
    transports = transport_all(group, tower)
    assert all(sorted(phi.values()) == sorted(tower.charts) for phi in transports.values())


def test_symmetric_cusp_under_swap():
    """(x^3, y^3) is principalized equivariantly under the swap."""
    group = closure([GroupElement.from_json({"vars": [2, 1]})], 2)
    tower = new_root(2)
    ideal = MonomialIdeal.of((3, 0), (0, 3))
    principalize(tower, ideal, group)
    assert _principal_everywhere(tower, ideal)
    transport_all(group, tower)
