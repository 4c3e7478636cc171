"""
Unit Tests for Monomial Algebra
================================
Run: pytest tests/test_monomials.py -v
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import pytest

from engine.errors import (
    ArityError,
    EngineError,
    ExponentOverflowError,
    NegativeExponentError,
    ZeroIdealError,
)
from engine.monomials import (
    MonomialIdeal,
    check_exponents,
    colon,
    gcd_and_residual,
    ideal_sum,
    intersect,
    is_locally_principal,
    membership,
    minimalize,
    quotient,
    substitute,
    to_text,
)
from engine.settings import reload_settings

X, Y = (1, 0), (0, 1)


@pytest.fixture
def small_cap(monkeypatch):
    monkeypatch.setenv("EQUIBLOW_EXPONENT_CAP", "10")
    reload_settings()
    yield
    monkeypatch.delenv("EQUIBLOW_EXPONENT_CAP")
    reload_settings()


# ═══════════════════════════════════════════
# Canonical form
# ═══════════════════════════════════════════

def test_canonical_order_two_variables():
    """Generators of one degree sort by descending exponent of x."""
    assert MonomialIdeal.of((0, 1), (1, 0)).generators == (X, Y)
    assert MonomialIdeal.of((0, 2), (1, 1), (2, 0)).generators == ((2, 0), (1, 1), (0, 2))


def test_canonical_order_puts_lower_degree_first():
    """Lower degree sorts first."""
    assert MonomialIdeal.of((1, 1, 0), (0, 0, 1)).to_json() == [[0, 0, 1], [1, 1, 0]]


def test_minimalize_drops_multiples():
    """Multiples of other generators are dropped."""
    ideal = minimalize([(1, 0), (2, 0), (1, 1), (0, 3)])
    assert ideal.generators == ((1, 0), (0, 3))


def test_equal_ideals_compare_equal():
    """Generator order does not matter."""
    assert MonomialIdeal.of((2, 0), (0, 1), (2, 1)) == MonomialIdeal.of((0, 1), (2, 0))


def test_empty_generators_is_zero_ideal():
    """No generators means the zero ideal."""
    with pytest.raises(ZeroIdealError):
        minimalize([])


def test_mixed_arity_rejected():
    """Generators must share one arity."""
    with pytest.raises(ArityError):
        minimalize([(1, 0), (1, 0, 0)])


def test_negative_exponent_rejected():
    """Negative exponents raise a coded engine error."""
    with pytest.raises(EngineError) as info:
        check_exponents((1, -1))
    assert isinstance(info.value, NegativeExponentError)
    assert info.value.to_dict()["code"] == "negative_exponent"


def test_exponent_cap(small_cap):
    """Exponents above the configured cap are rejected."""
    assert check_exponents((10, 0)) == (10, 0)
    with pytest.raises(ExponentOverflowError):
        check_exponents((11, 0))
    with pytest.raises(ExponentOverflowError):
        substitute((6, 0), [(2, 0), (0, 1)])


# ═══════════════════════════════════════════
# Operations
# ═══════════════════════════════════════════

def test_sum():
    assert ideal_sum(MonomialIdeal.of(X), MonomialIdeal.of(Y)) == MonomialIdeal.of(X, Y)
    assert ideal_sum(MonomialIdeal.of((2, 0)), MonomialIdeal.of((1, 0))) == MonomialIdeal.of((1, 0))


def test_intersect():
    """Intersection of (x, y^2) and (x^2, y)."""
    assert intersect(MonomialIdeal.of(X), MonomialIdeal.of(Y)) == MonomialIdeal.of((1, 1))
    pair = intersect(MonomialIdeal.of((1, 0), (0, 2)), MonomialIdeal.of((2, 0), (0, 1)))
    assert pair.to_json() == [[2, 0], [1, 1], [0, 2]]


def test_colon():
    """Colon ideals of monomial ideals."""
    assert colon(MonomialIdeal.of((2, 0), (1, 1)), MonomialIdeal.of(X)) == MonomialIdeal.of(X, Y)
    assert colon(MonomialIdeal.of(X), MonomialIdeal.of(X, Y)) == MonomialIdeal.of(X)
    assert colon(MonomialIdeal.of(X, Y), MonomialIdeal.of(X, Y)).is_unit()


def test_colon_by_unit_is_identity():
    ideal = MonomialIdeal.of((2, 1), (0, 3))
    assert colon(ideal, MonomialIdeal.unit_ideal(2)) == ideal


def test_membership():
    """Membership is divisibility by some generator."""
    ideal = MonomialIdeal.of((2, 0), (0, 1))
    assert membership((3, 0), ideal)
    assert (1, 1) in ideal
    assert not membership((1, 0), ideal)


def test_gcd_and_residual():
    """I = g·R with the residual's gcd equal to 1."""
    g, residual = gcd_and_residual(MonomialIdeal.of((2, 1), (1, 2)))
    assert g == (1, 1)
    assert residual == MonomialIdeal.of(X, Y)


def test_locally_principal():
    """Locally principal means one generator."""
    assert is_locally_principal(MonomialIdeal.of((3, 2)))
    assert is_locally_principal(MonomialIdeal.unit_ideal(3))
    assert not is_locally_principal(MonomialIdeal.of(X, Y))


# ═══════════════════════════════════════════
# Helpers
# ═══════════════════════════════════════════

def test_quotient():
    """Exponent-wise quotient."""
    assert quotient((2, 1), (1, 3)) == (1, 0)
    assert quotient((2, 1), (0, 0)) == (2, 1)


def test_substitute():
    """Substituting monomials for variables."""
    # x ↦ x, y ↦ xy applied to x y^2
    assert substitute((1, 2), [(1, 0), (1, 1)]) == (3, 2)


def test_to_text():
    assert to_text((2, 1), ["x", "y"]) == "x^2*y"
    assert to_text((0, 0)) == "1"
    assert MonomialIdeal.of((1, 0), (0, 2)).to_text(["x", "y"]) == "(x, y^2)"
