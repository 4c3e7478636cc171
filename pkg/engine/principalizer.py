"""
Principalizer
=============
Canonical, G-orbit-stable principalization of one monomial ideal (or ideal
sheaf) over the chart forest.

Selection invariant, per leaf, on the residual R of the leaf ideal
(I = gcd · R):

    ν_T = min over generators of R of Σ_{i∈T} a_i

Pairs T = {i, j} drive the schedule: the leaves whose max pair ν equals
the global defect get a center. When every pair ν vanishes on a
non-principal leaf (R = (x, y, z) for instance) the smallest subset size
with a positive ν_T is used instead. ν_T > 0 means R ⊆ (x_i : i ∈ T), so
every center lies inside the non-principal locus.

One step per iteration, one center per chart:
  - for each G-orbit of selected leaves, the representative (smallest id)
    picks its lexicographically smallest tied subset P;
  - the center there is the union of the stabilizer orbit of P (a
    separation center when that orbit has more than one member);
  - the center is transported to every other chart of the orbit.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Union

from .charts import BlowupStep, BlowupTower, IdealSheaf, as_sheaf
from .equivariance import (
    GroupAction,
    chart_orbits,
    chart_stabilizer,
    transport_all,
)
from .errors import NothingToDoError, PreconditionError, TerminationGuardError
from .monomials import Monomial, MonomialIdeal, gcd_and_residual, is_locally_principal
from .settings import get_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairInvariantRow:
    """Invariants of one leaf ideal."""

    nu: dict[tuple[int, int], int]
    chart_defect: int
    # (subset size k, max ν_T at that size) for the smallest k with a positive ν_T
    center_order: Optional[tuple[int, int]]
    tied_subsets: tuple[tuple[int, ...], ...]

    @property
    def is_principal(self) -> bool:
        return self.center_order is None

    def to_json(self) -> dict:
        return {
            "nu": {f"{i + 1},{j + 1}": v for (i, j), v in sorted(self.nu.items())},
            "chart_defect": self.chart_defect,
        }


@dataclass
class PairInvariantTable:
    rows: dict[int, PairInvariantRow]

    @property
    def global_defect(self) -> int:
        return max((r.chart_defect for r in self.rows.values()), default=0)

    def non_principal(self) -> list[int]:
        return sorted(c for c, r in self.rows.items() if not r.is_principal)


def _subset_nu(residual: MonomialIdeal, subset: tuple[int, ...]) -> int:
    return min(sum(g[i] for i in subset) for g in residual.generators)


def pair_invariants(chart_ideal: MonomialIdeal) -> PairInvariantRow:
    _, residual = gcd_and_residual(chart_ideal)
    n = chart_ideal.arity
    nu = {pair: _subset_nu(residual, pair) for pair in combinations(range(n), 2)}
    defect = max(nu.values(), default=0)

    if residual.is_unit():
        return PairInvariantRow(nu, defect, None, ())
    for k in range(2, n + 1):
        values = {T: _subset_nu(residual, T) for T in combinations(range(n), k)}
        best = max(values.values())
        if best > 0:
            tied = tuple(sorted(T for T, v in values.items() if v == best))
            return PairInvariantRow(nu, defect, (k, best), tied)
    raise PreconditionError(f"Residual {residual.to_json()} has no center of codimension ≥ 2")


def invariant_table(tower: BlowupTower, sheaf: IdealSheaf) -> PairInvariantTable:
    return PairInvariantTable({leaf: pair_invariants(sheaf.value_at(tower, leaf)) for leaf in tower.leaves()})


def _priority(row: PairInvariantRow) -> tuple[int, int]:
    k, value = row.center_order
    return (-k, value)


def select_step(
    tower: BlowupTower,
    ideal: Union[MonomialIdeal, IdealSheaf],
    group: Optional[GroupAction] = None,
    table: Optional[PairInvariantTable] = None,
) -> BlowupStep:
    """Choose the next orbit of centers; NothingToDoError when already principal."""
    sheaf = as_sheaf(ideal)
    group = group or GroupAction.trivial(tower.arity)
    table = table or invariant_table(tower, sheaf)
    pending = table.non_principal()
    if not pending:
        raise NothingToDoError("Ideal is already locally principal on every leaf")

    best = max(_priority(table.rows[c]) for c in pending)
    selected = [c for c in pending if _priority(table.rows[c]) == best]
    transports = transport_all(group, tower)

    centers: dict[int, frozenset[int]] = {}
    separated = False
    for orbit in chart_orbits(transports, selected):
        rep = orbit[0]
        chosen = frozenset(table.rows[rep].tied_subsets[0])
        stabilizer = chart_stabilizer(transports, rep)
        images = {g.act_on_set(chosen) for g in stabilizer}
        center = frozenset().union(*images)
        separated = separated or len(images) > 1
        for g, phi in transports.items():
            centers[phi[rep]] = g.act_on_set(center)

    k, value = -best[0], best[1]
    if separated:
        kind = "separation"
    elif k == 2:
        kind = "codim2"
    else:
        kind = f"codim{k}"
    shapes = sorted({"{" + ",".join(str(i + 1) for i in sorted(T)) + "}" for T in centers.values()})
    step = BlowupStep.of(centers.items(), orbit_tag=f"{kind}:nu={value}:{'|'.join(shapes)}")
    logger.debug(f"Selected step {step.orbit_tag} on charts {sorted(centers)}")
    return step


@dataclass
class PrincipalizationResult:
    tower: BlowupTower
    steps_taken: int
    defect_trace: list[int] = field(default_factory=list)
    # indices into defect_trace where the global defect went up
    defect_increases: list[int] = field(default_factory=list)
    generators: dict[int, Monomial] = field(default_factory=dict)
    normal_crossings: dict[int, dict] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "steps": self.steps_taken,
            "leaves": self.tower.leaves(),
            "principal_generators": {str(c): list(m) for c, m in sorted(self.generators.items())},
            "defect_trace": self.defect_trace,
            "defect_increases": self.defect_increases,
        }


def normal_crossing_certificate(tower: BlowupTower, leaf: int, generator: Monomial) -> dict:
    """Support of the principal generator split into exceptional and original coordinates."""
    flags = tower.chart(leaf).exceptional
    support = [i for i, e in enumerate(generator) if e > 0]
    return {
        "generator": list(generator),
        "exceptional_support": [i + 1 for i in support if flags[i]],
        "coordinate_support": [i + 1 for i in support if not flags[i]],
        "normal_crossing": True,
    }


def principalize(
    tower: BlowupTower,
    ideal: Union[MonomialIdeal, IdealSheaf],
    group: Optional[GroupAction] = None,
    max_steps: Optional[int] = None,
) -> PrincipalizationResult:
    """
    Extend `tower` until the ideal is locally principal on every leaf.

    The tower is extended in place and returned inside the result.
    TerminationGuardError carries the full invariant trace when the step
    budget runs out.
    """
    sheaf = as_sheaf(ideal)
    group = group or GroupAction.trivial(tower.arity)
    max_steps = get_settings().max_steps if max_steps is None else max_steps
    result = PrincipalizationResult(tower, 0)
    trace: list[dict] = []

    while True:
        table = invariant_table(tower, sheaf)
        defect = table.global_defect
        if result.defect_trace and defect > result.defect_trace[-1]:
            logger.warning(f"Global defect rose from {result.defect_trace[-1]} to {defect} "
                           f"after step {result.steps_taken}")
            result.defect_increases.append(len(result.defect_trace))
        result.defect_trace.append(defect)
        if not table.non_principal():
            break

        trace.append({
            "step": result.steps_taken,
            "global_defect": defect,
            "rows": {str(c): table.rows[c].to_json() for c in table.non_principal()},
        })
        if result.steps_taken >= max_steps:
            raise TerminationGuardError(
                f"Ideal not principal after {max_steps} steps", trace=trace, max_steps=max_steps,
            )
        tower.apply_step(select_step(tower, sheaf, group, table))
        result.steps_taken += 1

    for leaf in tower.leaves():
        value = sheaf.value_at(tower, leaf)
        assert is_locally_principal(value), f"leaf {leaf} not principal"
        result.generators[leaf] = value.generators[0]
        result.normal_crossings[leaf] = normal_crossing_certificate(tower, leaf, value.generators[0])

    logger.info(f"Principalized in {result.steps_taken} step(s); {len(tower.leaves())} leaves")
    return result
