"""
Collection Simplifier
=====================
Simplifies an unordered, G-invariant collection {I_1, …, I_n} of monomial
ideals: after the returned tower every π*I_j is locally principal on every
leaf, and every g ∈ G lifts to the tower.

Descending induction on the intersection depth i = n+1, …, 2:

    on entry     S_Λ = Σ_{j∈Λ} I_j is (1) on every leaf whenever |Λ| = i
    stage ideal  J = ∩_{|Ω| = i-1} S_Ω
    principalize J (equivariantly)
    weak transforms I'_j = (π*I_j) : (π*J)
    on exit      S'_Λ is (1) on every leaf whenever |Λ| = i-1

The conditions are evaluated leaf-wise: on a chart a sum of monomial
ideals is (1) iff one of its members is (1) there.

The collection is consumed in canonical multiset order, so the input order
never affects the tower. Weak transforms are recomputed from fresh
pullbacks of the previous stage's sheaves.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

from .charts import BlowupTower, IdealSheaf
from .equivariance import (
    GroupAction,
    act_on_ideal,
    check_collection_invariant,
    induced_permutations,
    sheaf_equivariance_witnesses,
    transport_all,
)
from .errors import (
    ArityError,
    EquivarianceBrokenError,
    PreconditionError,
    StageInvariantError,
    ZeroIdealError,
)
from .monomials import (
    MonomialIdeal,
    colon,
    intersect_all,
    is_locally_principal,
    sum_all,
)
from .principalizer import principalize
from .settings import get_settings

logger = logging.getLogger(__name__)

LeafIdeals = dict[int, list[MonomialIdeal]]


def check_depth_condition(leaf_ideals: LeafIdeals, i: int) -> tuple[bool, list[dict]]:
    """
    Test S_Λ = (1) for every |Λ| = i on every leaf.

    Returns (holds, witnesses) with one witness {leaf, subset} per failing
    pair; the subset is one-based. Vacuous when i exceeds the collection size.
    """
    witnesses = []
    for leaf, ideals in sorted(leaf_ideals.items()):
        for subset in combinations(range(len(ideals)), i):
            if not any(ideals[j].is_unit() for j in subset):
                witnesses.append({"leaf": leaf, "subset": [j + 1 for j in subset]})
    return not witnesses, witnesses


def stage_ideal(leaf_ideals: LeafIdeals, i: int) -> dict[int, MonomialIdeal]:
    """J = ∩_{|Ω| = i-1} S_Ω on every leaf."""
    out = {}
    for leaf, ideals in sorted(leaf_ideals.items()):
        sums = [sum_all([ideals[j] for j in omega]) for omega in combinations(range(len(ideals)), i - 1)]
        out[leaf] = intersect_all(sums)
    return out


def weak_transforms(
    tower: BlowupTower, current: Sequence[IdealSheaf], stage_sheaf: IdealSheaf, i: int = 0
) -> tuple[list[IdealSheaf], list[dict]]:
    """Conductors (π*I_j) : (π*J) on every leaf, with a provenance entry per (leaf, j)."""
    values: list[dict[int, MonomialIdeal]] = [{} for _ in current]
    provenance = []
    for leaf in tower.leaves():
        J = stage_sheaf.value_at(tower, leaf)
        if not is_locally_principal(J):
            raise PreconditionError(f"Stage ideal is not principal on leaf {leaf}", leaf=leaf)
        for j, sheaf in enumerate(current):
            source = sheaf.value_at(tower, leaf)
            values[j][leaf] = colon(source, J)
            provenance.append({
                "stage": i,
                "leaf": leaf,
                "index": j + 1,
                "pullback": source.to_json(),
                "stage_ideal": J.to_json(),
                "weak_transform": values[j][leaf].to_json(),
            })
    return [IdealSheaf(v) for v in values], provenance


def verify_stalk_formula(
    tower: BlowupTower, before: Sequence[IdealSheaf], after: Sequence[IdealSheaf]
) -> tuple[bool, list[dict]]:
    """On every current leaf: I'_j principal ⟺ π*I_j principal."""
    witnesses = []
    for leaf in tower.leaves():
        for j, (b, a) in enumerate(zip(before, after)):
            if is_locally_principal(b.value_at(tower, leaf)) != is_locally_principal(a.value_at(tower, leaf)):
                witnesses.append({"leaf": leaf, "index": j + 1})
    return not witnesses, witnesses


def _leaf_values(tower: BlowupTower, sheaves: Sequence[IdealSheaf]) -> LeafIdeals:
    return {leaf: [s.value_at(tower, leaf) for s in sheaves] for leaf in tower.leaves()}


def canonical_order(collection: Sequence[MonomialIdeal]) -> list[int]:
    """Input indices listed in canonical multiset order."""
    return sorted(range(len(collection)), key=lambda k: (collection[k].sort_key(), k))


@dataclass
class StageRecord:
    i: int
    entry_witnesses: list[dict]
    stage_ideal: dict[int, MonomialIdeal]
    skipped: bool
    first_step: int
    last_step: int
    before: list[IdealSheaf]
    after: list[IdealSheaf]
    provenance: list[dict] = field(default_factory=list)
    exit_witnesses: list[dict] = field(default_factory=list)
    stalk_formula: bool = True
    defect_increases: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "condition_witnesses": self.entry_witnesses,
            "stage_ideal": {str(c): I.to_json() for c, I in sorted(self.stage_ideal.items())},
            "skipped": self.skipped,
            "steps": [self.first_step, self.last_step],
            "weak_transforms": [
                {str(c): I.to_json() for c, I in sorted(s.values.items())} for s in self.after
            ],
            "inters_prime_witnesses": self.exit_witnesses,
            "stalk_formula": self.stalk_formula,
        }


@dataclass
class SimplificationResult:
    tower: BlowupTower
    collection: list[MonomialIdeal]
    input_order: list[int]
    sigmas: dict
    stages: list[StageRecord]
    transports: dict
    stopped_early: bool = False

    def leaf_pullbacks(self) -> dict[int, list[MonomialIdeal]]:
        return {leaf: [self.tower.total_transform(leaf, I) for I in self.collection]
                for leaf in self.tower.leaves()}

    def provenance(self) -> list[dict]:
        return [entry for stage in self.stages for entry in stage.provenance]


def simplify_collection(
    collection: Sequence[MonomialIdeal],
    group: Optional[GroupAction] = None,
    max_steps: Optional[int] = None,
    variable_names: Optional[Sequence[str]] = None,
    stop_when_principal: bool = True,
) -> SimplificationResult:
    """
    Build an equivariant tower making every ideal of `collection` locally principal.

    Args:
        collection: the ideals, in any order (duplicates allowed).
        group: finite permutation group preserving the collection.
        max_steps: total step budget over all stages.
        stop_when_principal: skip the remaining stages once every current
            weak transform is already principal (the original pullbacks are
            then principal too).
    """
    if not collection:
        raise ZeroIdealError("An empty collection has nothing to simplify")
    arity = collection[0].arity
    if any(I.arity != arity for I in collection):
        raise ArityError("Collection members have different arities")
    group = group or GroupAction.trivial(arity)
    max_steps = get_settings().max_steps if max_steps is None else max_steps

    check_collection_invariant(group, collection)
    order = canonical_order(collection)
    canon = [collection[k] for k in order]
    sigmas = induced_permutations(group, canon, act_on_ideal, lambda g: None, "ideal")
    n = len(canon)

    tower = BlowupTower(arity, variable_names)
    current = [IdealSheaf.at_root(I) for I in canon]
    stages: list[StageRecord] = []
    stopped_early = False
    logger.info(f"Simplifying {n} ideal(s) in {arity} variable(s) under a group of order {group.order}")

    for i in range(n + 1, 1, -1):
        values = _leaf_values(tower, current)
        if stop_when_principal and all(is_locally_principal(I) for ideals in values.values() for I in ideals):
            logger.info(f"All transforms principal before stage {i}; stopping")
            stopped_early = True
            break

        holds, entry_witnesses = check_depth_condition(values, i)
        if not holds:
            raise StageInvariantError(f"Depth condition fails on entry to stage {i}", witnesses=entry_witnesses)

        J = IdealSheaf(stage_ideal(values, i))
        first_step = len(tower.steps)
        skipped = all(I.is_unit() for I in J.values.values())
        defect_increases: list[int] = []
        if skipped:
            logger.info(f"Stage {i}: stage ideal is (1) everywhere, no blowups")
        else:
            budget = max_steps - len(tower.steps)
            defect_increases = principalize(tower, J, group, max_steps=max(budget, 0)).defect_increases

        after, provenance = weak_transforms(tower, current, J, i)
        holds, exit_witnesses = check_depth_condition(_leaf_values(tower, after), i - 1)
        if not holds:
            raise StageInvariantError(f"Depth condition fails at level {i - 1} after stage {i}",
                                      witnesses=exit_witnesses)
        stalk_ok, stalk_witnesses = verify_stalk_formula(tower, current, after)
        if not stalk_ok:
            raise StageInvariantError(f"Stage {i}: weak transforms change principality", witnesses=stalk_witnesses)

        if i == 2:
            # pairwise disjoint supports: principalizing the intersection principalizes each member
            for leaf, ideals in _leaf_values(tower, current).items():
                if not all(is_locally_principal(I) for I in ideals):
                    raise StageInvariantError(f"Disjoint base case fails on leaf {leaf}", leaf=leaf)

        stages.append(StageRecord(
            i=i,
            entry_witnesses=entry_witnesses,
            stage_ideal=dict(J.values),
            skipped=skipped,
            first_step=first_step,
            last_step=len(tower.steps),
            before=list(current),
            after=after,
            provenance=provenance,
            exit_witnesses=exit_witnesses,
            defect_increases=defect_increases,
        ))
        logger.info(f"Stage {i} done: {len(tower.steps) - first_step} step(s), {len(tower.leaves())} leaves")
        current = after

    for leaf in tower.leaves():
        for j, I in enumerate(canon):
            if not is_locally_principal(tower.total_transform(leaf, I)):
                raise StageInvariantError(f"Ideal {j + 1} is not principal on leaf {leaf}", leaf=leaf, index=j + 1)

    for stage in stages:
        stage.stalk_formula, _ = verify_stalk_formula(tower, stage.before, stage.after)

    transports = transport_all(group, tower)
    for stage in stages:
        witnesses = sheaf_equivariance_witnesses(tower, transports, stage.after, sigmas)
        if witnesses:
            raise EquivarianceBrokenError(f"Weak transforms of stage {stage.i} are not equivariant",
                                          witnesses=witnesses[:5])

    return SimplificationResult(tower, canon, order, sigmas, stages, transports, stopped_early)
