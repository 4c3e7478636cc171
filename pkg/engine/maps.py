"""
Map Resolver
============
Eliminates the indeterminacy of a G-equivariant monomial rational map
f = [f_0 : … : f_m] from affine space to projective space.

The map is regular exactly where its base ideal (f_0, …, f_m) is locally
principal, so resolving f means principalizing the base ideal under G. On
each leaf the pulled-back coordinates share a gcd g; dividing it out gives
the regular form, and the leaf is regular iff one reduced coordinate is 1.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .charts import BlowupTower
from .equivariance import (
    GroupAction,
    act_on_monomial,
    induced_permutations,
    transport_all,
)
from .errors import ArityError, PreconditionError
from .monomials import (
    Monomial,
    MonomialIdeal,
    check_exponents,
    divides,
    is_locally_principal,
    minimalize,
    monomial_gcd_all,
    quotient,
    substitute,
    unit,
)
from .principalizer import principalize
from .settings import get_settings
from .simplifier import simplify_collection

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RationalMapSpec:
    arity: int
    coordinates: tuple[Monomial, ...]
    group: GroupAction

    @classmethod
    def of(cls, coordinates: Sequence[Sequence[int]], group: Optional[GroupAction] = None) -> "RationalMapSpec":
        coords = tuple(check_exponents(c) for c in coordinates)
        if not coords:
            raise PreconditionError("A rational map needs at least one coordinate")
        arity = len(coords[0])
        if any(len(c) != arity for c in coords):
            raise ArityError("Map coordinates have different arities")
        return cls(arity, coords, group or GroupAction.trivial(arity))

    def coordinate_permutations(self) -> dict:
        """σ_g with g·f_k = f_{σ_g(k)}; NotInvariantError when the map is not equivariant."""
        return induced_permutations(self.group, self.coordinates, act_on_monomial,
                                    lambda g: g.coord_perm, "coordinate")


@dataclass(frozen=True)
class LeafMap:
    common_factor: Monomial
    reduced: tuple[Monomial, ...]
    regular: bool

    def to_json(self) -> dict:
        return {
            "common_factor": list(self.common_factor),
            "reduced": [list(m) for m in self.reduced],
            "regular": self.regular,
        }


@dataclass
class ResolvedMap:
    spec: RationalMapSpec
    tower: BlowupTower
    leaves: dict[int, LeafMap] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {str(c): m.to_json() for c, m in sorted(self.leaves.items())}


def base_ideal(spec: RationalMapSpec) -> MonomialIdeal:
    return minimalize(spec.coordinates)


def leaf_map(tower: BlowupTower, spec: RationalMapSpec, chart_id: int) -> LeafMap:
    images = tower.composite_substitution(chart_id)
    pulled = [substitute(f, images) for f in spec.coordinates]
    g = monomial_gcd_all(pulled)
    reduced = tuple(quotient(f, g) for f in pulled)
    return LeafMap(g, reduced, unit(spec.arity) in reduced)


def leaf_maps(tower: BlowupTower, spec: RationalMapSpec) -> dict[int, LeafMap]:
    """Regular forms of `spec` on every leaf of any tower."""
    return {leaf: leaf_map(tower, spec, leaf) for leaf in tower.leaves()}


def resolve(
    spec: RationalMapSpec,
    max_steps: Optional[int] = None,
    variable_names: Optional[Sequence[str]] = None,
) -> ResolvedMap:
    spec.coordinate_permutations()
    max_steps = get_settings().max_steps if max_steps is None else max_steps
    tower = BlowupTower(spec.arity, variable_names)
    principalize(tower, base_ideal(spec), spec.group, max_steps)
    transport_all(spec.group, tower)
    resolved = ResolvedMap(spec, tower, leaf_maps(tower, spec))
    logger.info(f"Resolved map with {len(spec.coordinates)} coordinates in {tower.blowup_count()} blowup(s)")
    return resolved


def resolve_family(
    specs: Sequence[RationalMapSpec],
    group: Optional[GroupAction] = None,
    max_steps: Optional[int] = None,
    variable_names: Optional[Sequence[str]] = None,
) -> list[ResolvedMap]:
    """
    Resolve several maps on one tower by simplifying the collection of their
    base ideals; `group` must permute that collection.
    """
    if not specs:
        return []
    result = simplify_collection([base_ideal(s) for s in specs], group, max_steps, variable_names)
    return [ResolvedMap(s, result.tower, leaf_maps(result.tower, s)) for s in specs]


def _well_formed(data: LeafMap, spec: RationalMapSpec) -> bool:
    """One reduced coordinate per map coordinate, every monomial of the map's arity."""
    return (
        len(data.common_factor) == spec.arity
        and len(data.reduced) == len(spec.coordinates)
        and all(len(r) == spec.arity for r in data.reduced)
    )


def verify_resolution(resolved: ResolvedMap) -> tuple[bool, list[dict]]:
    """
    Re-derive every leaf from scratch and compare with the recorded data.

    Checks gcd correctness, the regularity witness, that g·reduced rebuilds
    the pulled-back coordinates, and equivariance of the reduced maps.
    """
    spec, tower = resolved.spec, resolved.tower
    witnesses = []
    for leaf in tower.leaves():
        data = resolved.leaves.get(leaf)
        if data is None:
            witnesses.append({"leaf": leaf, "check": "missing"})
            continue
        if not _well_formed(data, spec):
            witnesses.append({"leaf": leaf, "check": "shape"})
            continue
        images = tower.composite_substitution(leaf)
        pulled = [substitute(f, images) for f in spec.coordinates]
        if any(not divides(data.common_factor, f) for f in pulled):
            witnesses.append({"leaf": leaf, "check": "common_factor_divides"})
        rebuilt = [tuple(a + b for a, b in zip(data.common_factor, r)) for r in data.reduced]
        if rebuilt != pulled:
            witnesses.append({"leaf": leaf, "check": "factorization"})
        if data.reduced and monomial_gcd_all(data.reduced) != unit(spec.arity):
            witnesses.append({"leaf": leaf, "check": "reduced_gcd"})
        if data.regular != (unit(spec.arity) in data.reduced):
            witnesses.append({"leaf": leaf, "check": "regular_flag"})
        if data.regular != is_locally_principal(tower.total_transform(leaf, base_ideal(spec))):
            witnesses.append({"leaf": leaf, "check": "regular_iff_principal"})
        if not data.regular:
            witnesses.append({"leaf": leaf, "check": "not_regular"})

    sigmas = spec.coordinate_permutations()
    for g, phi in transport_all(spec.group, tower).items():
        for leaf, data in resolved.leaves.items():
            mirror = resolved.leaves.get(phi.get(leaf))
            if mirror is None or not (_well_formed(data, spec) and _well_formed(mirror, spec)):
                continue
            for k, r in enumerate(data.reduced):
                if mirror.reduced[sigmas[g][k]] != act_on_monomial(g, r):
                    witnesses.append({"leaf": leaf, "check": "equivariance", "element": g.to_json()})
                    break
    return not witnesses, witnesses
