"""
Monomial Algebra
================
Exact arithmetic for monomials and monomial ideals on a fixed variable set.

A monomial is its exponent vector (a tuple of non-negative ints, the
all-zeros vector being 1). A MonomialIdeal stores its minimal generating
set in canonical order, so equal ideals compare (and serialize) equal.

Canonical order: ascending total degree, then descending exponent vector,
e.g. (x, y), (x², xy, y²), (z, xy).

All values are immutable; every operation is a pure function.
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from sympy.polys.monomials import (
    monomial_deg,
    monomial_divides,
    monomial_gcd,
    monomial_lcm,
    monomial_ldiv,
)

from .errors import ArityError, ExponentOverflowError, NegativeExponentError, ZeroIdealError
from .settings import get_settings

logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]


def unit(arity: int) -> Monomial:
    return (0,) * arity


def variable(index: int, arity: int) -> Monomial:
    """The monomial x_index."""
    return tuple(1 if k == index else 0 for k in range(arity))


def canonical_key(m: Monomial) -> tuple:
    return (monomial_deg(m), tuple(-e for e in m))


def check_exponents(m: Sequence[int]) -> Monomial:
    """Validate and normalize an exponent vector."""
    cap = get_settings().exponent_cap
    for e in m:
        if e < 0:
            raise NegativeExponentError(f"Negative exponent in {tuple(m)}", monomial=list(m))
        if e > cap:
            raise ExponentOverflowError(f"Exponent {e} exceeds cap {cap}", monomial=list(m))
    return tuple(int(e) for e in m)


def divides(a: Monomial, b: Monomial) -> bool:
    return monomial_divides(a, b)


def quotient(a: Monomial, b: Monomial) -> Monomial:
    """a / gcd(a, b): the part of a not covered by b."""
    return monomial_ldiv(a, monomial_gcd(a, b))


def substitute(m: Monomial, images: Sequence[Monomial]) -> Monomial:
    """Apply the monomial map x_i ↦ images[i] to m."""
    if len(m) != len(images):
        raise ArityError(f"Substitution has {len(images)} images for arity {len(m)}")
    width = len(images[0]) if images else 0
    out = [0] * width
    for e, image in zip(m, images):
        if e:
            for k, a in enumerate(image):
                out[k] += e * a
    return check_exponents(out)


def to_text(m: Monomial, names: Sequence[str] = ()) -> str:
    """Human form, e.g. x^2*y; '1' for the unit."""
    names = list(names) or [f"x{k + 1}" for k in range(len(m))]
    parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e]
    return "*".join(parts) or "1"


@dataclass(frozen=True)
class MonomialIdeal:
    """Monomial ideal given by its minimal generators in canonical order."""

    arity: int
    generators: tuple[Monomial, ...]

    # ─── Construction ───

    @classmethod
    def of(cls, *gens: Sequence[int]) -> "MonomialIdeal":
        return minimalize(gens)

    @classmethod
    def unit_ideal(cls, arity: int) -> "MonomialIdeal":
        return cls(arity, (unit(arity),))

    @classmethod
    def from_json(cls, data: list) -> "MonomialIdeal":
        return minimalize(data)

    # ─── Queries ───

    def is_unit(self) -> bool:
        return self.generators == (unit(self.arity),)

    def sort_key(self) -> tuple:
        return (len(self.generators), tuple(canonical_key(g) for g in self.generators))

    def to_json(self) -> list[list[int]]:
        return [list(g) for g in self.generators]

    def to_text(self, names: Sequence[str] = ()) -> str:
        return "(" + ", ".join(to_text(g, names) for g in self.generators) + ")"

    def __contains__(self, m: Monomial) -> bool:
        return membership(m, self)


def _same_arity(*ideals: MonomialIdeal) -> int:
    arities = {I.arity for I in ideals}
    if len(arities) != 1:
        raise ArityError(f"Ideals of different arity: {sorted(arities)}")
    return arities.pop()


# ═══════════════════════════════════════════
# Operations
# ═══════════════════════════════════════════

def minimalize(gens: Iterable[Sequence[int]]) -> MonomialIdeal:
    """Ideal generated by `gens` with divisible generators dropped."""
    monomials = {check_exponents(g) for g in gens}
    if not monomials:
        raise ZeroIdealError("The zero ideal (no generators) is not representable")
    arities = {len(m) for m in monomials}
    if len(arities) != 1:
        raise ArityError(f"Generators of mixed arity: {sorted(arities)}")

    kept: list[Monomial] = []
    # degree-ascending order puts every divisor before its multiples
    for m in sorted(monomials, key=canonical_key):
        if not any(monomial_divides(k, m) for k in kept):
            kept.append(m)
    return MonomialIdeal(arities.pop(), tuple(kept))


def ideal_sum(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    _same_arity(I, J)
    return minimalize(I.generators + J.generators)


def intersect(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    _same_arity(I, J)
    return minimalize(monomial_lcm(f, g) for f in I.generators for g in J.generators)


def intersect_all(ideals: Sequence[MonomialIdeal]) -> MonomialIdeal:
    return reduce(intersect, ideals)


def sum_all(ideals: Sequence[MonomialIdeal]) -> MonomialIdeal:
    return reduce(ideal_sum, ideals)


def colon(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    """The conductor I : J = {m : m·J ⊆ I}."""
    _same_arity(I, J)
    parts = [minimalize(quotient(g, f) for g in I.generators) for f in J.generators]
    return intersect_all(parts)


def membership(m: Monomial, I: MonomialIdeal) -> bool:
    if len(m) != I.arity:
        raise ArityError(f"Monomial of arity {len(m)} tested against ideal of arity {I.arity}")
    return any(monomial_divides(g, m) for g in I.generators)


def monomial_gcd_all(monomials: Sequence[Monomial]) -> Monomial:
    return reduce(monomial_gcd, monomials)


def gcd_and_residual(I: MonomialIdeal) -> tuple[Monomial, MonomialIdeal]:
    """Split I = g·R with g the gcd of the generators and gcd(R) = 1."""
    g = monomial_gcd_all(I.generators)
    return g, minimalize(monomial_ldiv(f, g) for f in I.generators)


def is_locally_principal(I: MonomialIdeal) -> bool:
    return len(I.generators) == 1
