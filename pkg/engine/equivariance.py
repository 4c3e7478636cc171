"""
Equivariance
============
Finite permutation groups acting on variables, on an indexed collection of
ideals, on the coordinates of a rational map and, induced, on the charts of
a blowup tower.

An element g maps x_i to x_{g(i)}; on exponent vectors (g·e)[g(i)] = e[i].
The induced action on a chart reuses the same variable permutation: the
child of (c, T, branch j) is sent to the child of (φ_g(c), g·T, branch g(j)).

Composition follows the left-action convention g∘h (apply h, then g), so
ideal and coordinate permutations form homomorphisms σ_{g∘h} = σ_g∘σ_h.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from sympy.combinatorics import Permutation

from .charts import BlowupTower, IdealSheaf
from .errors import (
    ArityError,
    EquivarianceBrokenError,
    InconsistentActionError,
    NotInvariantError,
)
from .monomials import Monomial, MonomialIdeal, minimalize

logger = logging.getLogger(__name__)


def _identity(size: int) -> Permutation:
    return Permutation(list(range(size)))


def _compose(p: Optional[Permutation], q: Optional[Permutation]) -> Optional[Permutation]:
    """p∘q (q first); sympy's p*q applies p first."""
    if p is None and q is None:
        return None
    if p is None or q is None:
        raise InconsistentActionError("Cannot compose an element with a partial action")
    return q * p


@dataclass(frozen=True)
class GroupElement:
    var_perm: Permutation
    ideal_perm: Optional[Permutation] = None
    coord_perm: Optional[Permutation] = None

    @classmethod
    def from_images(
        cls,
        var_images: Sequence[int],
        ideal_images: Optional[Sequence[int]] = None,
        coord_images: Optional[Sequence[int]] = None,
    ) -> "GroupElement":
        """Build from zero-based image lists."""
        return cls(
            Permutation(list(var_images)),
            None if ideal_images is None else Permutation(list(ideal_images)),
            None if coord_images is None else Permutation(list(coord_images)),
        )

    @classmethod
    def identity(cls, arity: int, n_ideals: Optional[int] = None, n_coords: Optional[int] = None) -> "GroupElement":
        return cls(
            _identity(arity),
            None if n_ideals is None else _identity(n_ideals),
            None if n_coords is None else _identity(n_coords),
        )

    @classmethod
    def from_json(cls, data: dict) -> "GroupElement":
        def zero_based(key):
            images = data.get(key)
            return None if images is None else [i - 1 for i in images]
        return cls.from_images(zero_based("vars"), zero_based("ideals"), zero_based("coords"))

    @property
    def arity(self) -> int:
        return self.var_perm.size

    def __call__(self, i: int) -> int:
        return self.var_perm(i)

    def is_identity(self) -> bool:
        return self.var_perm.is_Identity

    def compose(self, other: "GroupElement") -> "GroupElement":
        """self∘other."""
        return GroupElement(
            _compose(self.var_perm, other.var_perm),
            _compose(self.ideal_perm, other.ideal_perm),
            _compose(self.coord_perm, other.coord_perm),
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(
            ~self.var_perm,
            None if self.ideal_perm is None else ~self.ideal_perm,
            None if self.coord_perm is None else ~self.coord_perm,
        )

    def sort_key(self) -> tuple:
        return tuple(self.var_perm.array_form)

    def act_on_set(self, indices: Iterable[int]) -> frozenset[int]:
        return frozenset(self.var_perm(i) for i in indices)

    def to_json(self) -> dict:
        out = {"vars": [i + 1 for i in self.var_perm.array_form]}
        if self.ideal_perm is not None:
            out["ideals"] = [i + 1 for i in self.ideal_perm.array_form]
        if self.coord_perm is not None:
            out["coords"] = [i + 1 for i in self.coord_perm.array_form]
        return out


@dataclass(frozen=True)
class GroupAction:
    arity: int
    elements: tuple[GroupElement, ...]
    generators: tuple[GroupElement, ...]

    @classmethod
    def trivial(cls, arity: int) -> "GroupAction":
        return closure([], arity)

    @property
    def order(self) -> int:
        return len(self.elements)

    def element(self, var_perm: Permutation) -> GroupElement:
        for e in self.elements:
            if e.var_perm == var_perm:
                return e
        raise KeyError(f"No element with variable permutation {var_perm.array_form}")

    def __iter__(self):
        return iter(self.elements)


# ═══════════════════════════════════════════
# Group construction
# ═══════════════════════════════════════════

def closure(generators: Iterable[GroupElement], arity: int) -> GroupAction:
    """Breadth-first closure of `generators` under composition."""
    gens = list(generators)
    for g in gens:
        if g.arity != arity:
            raise ArityError(f"Element acts on {g.arity} variables, expected {arity}")
    ideal_sizes = {None if g.ideal_perm is None else g.ideal_perm.size for g in gens}
    coord_sizes = {None if g.coord_perm is None else g.coord_perm.size for g in gens}
    if len(ideal_sizes) > 1 or len(coord_sizes) > 1:
        raise InconsistentActionError("Generators disagree on which index sets they permute")

    identity = GroupElement.identity(
        arity,
        next(iter(ideal_sizes)) if ideal_sizes else None,
        next(iter(coord_sizes)) if coord_sizes else None,
    )
    found: dict[tuple, GroupElement] = {identity.sort_key(): identity}
    queue = [identity]
    while queue:
        current = queue.pop(0)
        for g in gens:
            product = g.compose(current)
            existing = found.get(product.sort_key())
            if existing is None:
                found[product.sort_key()] = product
                queue.append(product)
            elif existing != product:
                raise InconsistentActionError(
                    f"Variable permutation {product.var_perm.array_form} carries two different "
                    f"index permutations",
                    vars=[i + 1 for i in product.var_perm.array_form],
                )

    elements = tuple(found[k] for k in sorted(found))
    return GroupAction(arity, elements, tuple(gens))


# ═══════════════════════════════════════════
# Actions
# ═══════════════════════════════════════════

def act_on_monomial(g: GroupElement, m: Monomial) -> Monomial:
    if len(m) != g.arity:
        raise ArityError(f"Element of arity {g.arity} applied to monomial of arity {len(m)}")
    out = [0] * len(m)
    for i, e in enumerate(m):
        out[g(i)] = e
    return tuple(out)


def act_on_ideal(g: GroupElement, ideal: MonomialIdeal) -> MonomialIdeal:
    if ideal.arity != g.arity:
        raise ArityError(f"Element of arity {g.arity} applied to ideal of arity {ideal.arity}")
    return minimalize(act_on_monomial(g, m) for m in ideal.generators)


def _match_images(images: Sequence, items: Sequence) -> Optional[list[int]]:
    """Stable matching images[k] == items[σ(k)], equal items matched in order."""
    used: set[int] = set()
    sigma = []
    for img in images:
        target = next((m for m, item in enumerate(items) if item == img and m not in used), None)
        if target is None:
            return None
        used.add(target)
        sigma.append(target)
    return sigma


def induced_permutations(
    group: GroupAction,
    items: Sequence,
    act: Callable[[GroupElement, object], object],
    given: Callable[[GroupElement], Optional[Permutation]],
    label: str,
) -> dict[GroupElement, tuple[int, ...]]:
    """For each g find σ_g with g·items[k] = items[σ_g(k)], then check σ is a homomorphism."""
    sigmas: dict[GroupElement, tuple[int, ...]] = {}
    for g in group:
        images = [act(g, item) for item in items]
        explicit = given(g)
        if explicit is not None:
            if explicit.size != len(items):
                raise NotInvariantError(f"{label} permutation has size {explicit.size}, expected {len(items)}",
                                        element=g.to_json())
            sigma = explicit.array_form
            for k, img in enumerate(images):
                if img != items[sigma[k]]:
                    raise NotInvariantError(
                        f"Element {g.to_json()} sends {label} {k + 1} outside its declared image {sigma[k] + 1}",
                        element=g.to_json(), index=k + 1,
                    )
        else:
            sigma = _match_images(images, items)
            if sigma is None:
                missing = next(k for k, img in enumerate(images) if img not in items)
                raise NotInvariantError(
                    f"Element {g.to_json()} maps {label} {missing + 1} outside the collection",
                    element=g.to_json(), index=missing + 1,
                )
        sigmas[g] = tuple(sigma)

    for g in group:
        for h in group:
            gh = group.element(g.compose(h).var_perm)
            expected = tuple(sigmas[g][k] for k in sigmas[h])
            if sigmas[gh] != expected:
                raise NotInvariantError(f"{label.capitalize()} permutations are not a homomorphism",
                                        element=gh.to_json())
    return sigmas


def check_collection_invariant(
    group: GroupAction, collection: Sequence[MonomialIdeal]
) -> dict[GroupElement, tuple[int, ...]]:
    """σ_g for every g with g·I_k = I_{σ_g(k)}; NotInvariantError otherwise."""
    arities = {I.arity for I in collection} | {group.arity}
    if len(arities) != 1:
        raise ArityError(f"Collection and group arities differ: {sorted(arities)}")
    return induced_permutations(group, collection, act_on_ideal, lambda g: g.ideal_perm, "ideal")


# ═══════════════════════════════════════════
# Towers
# ═══════════════════════════════════════════

def transport_tower(g: GroupElement, tower: BlowupTower) -> dict[int, int]:
    """
    Lift g to a chart bijection φ_g, step by step.

    Raises EquivarianceBrokenError when some step's centers are not closed
    under g or a substitution fails to commute with g.
    """
    if g.arity != tower.arity:
        raise ArityError(f"Element of arity {g.arity} cannot act on a tower of arity {tower.arity}")
    phi = {tower.root_id: tower.root_id}
    for index, step in enumerate(tower.steps, start=1):
        for c, T in step.centers:
            target = phi[c]
            image = g.act_on_set(T)
            if step.center_on(target) != image:
                raise EquivarianceBrokenError(
                    f"Step {index}: center {sorted(i + 1 for i in T)} on chart {c} has no image "
                    f"{sorted(i + 1 for i in image)} on chart {target}",
                    step=index, chart=c,
                )
            for j in sorted(T):
                child = tower.chart(tower.child(c, j))
                mirror = tower.chart(tower.child(target, g(j)))
                for k, m in enumerate(child.substitution):
                    if mirror.substitution[g(k)] != act_on_monomial(g, m):
                        raise EquivarianceBrokenError(
                            f"Step {index}: substitutions of charts {child.id} and {mirror.id} do not commute with g",
                            step=index, chart=child.id,
                        )
                phi[child.id] = mirror.id
    return phi


def transport_all(group: GroupAction, tower: BlowupTower) -> dict[GroupElement, dict[int, int]]:
    return {g: transport_tower(g, tower) for g in group}


def chart_stabilizer(transports: dict[GroupElement, dict[int, int]], chart_id: int) -> list[GroupElement]:
    return [g for g, phi in transports.items() if phi[chart_id] == chart_id]


def chart_orbits(transports: dict[GroupElement, dict[int, int]], chart_ids: Iterable[int]) -> list[list[int]]:
    """Orbits of the induced action, each sorted; representatives are the minimal ids."""
    remaining = sorted(set(chart_ids))
    orbits = []
    while remaining:
        rep = remaining[0]
        orbit = sorted({phi[rep] for phi in transports.values()} | {rep})
        orbits.append(orbit)
        remaining = [c for c in remaining if c not in orbit]
    return orbits


def sheaf_equivariance_witnesses(
    tower: BlowupTower,
    transports: dict[GroupElement, dict[int, int]],
    sheaves: Sequence[IdealSheaf],
    sigmas: dict[GroupElement, tuple[int, ...]],
) -> list[dict]:
    """Leaves where sheaf σ_g(j) on φ_g(leaf) differs from g·(sheaf j on leaf)."""
    witnesses = []
    for g, phi in transports.items():
        for leaf in tower.leaves():
            for j, sheaf in enumerate(sheaves):
                image = act_on_ideal(g, sheaf.value_at(tower, leaf))
                target = sheaves[sigmas[g][j]].value_at(tower, phi[leaf])
                if image != target:
                    witnesses.append({"element": g.to_json(), "leaf": leaf, "index": j + 1})
    return witnesses
