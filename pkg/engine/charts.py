"""
Chart Atlas
===========
Smooth toric charts, blowups along coordinate-subspace centers, and the
blowup tower X_m → … → X_0.

The atlas is a chart forest: a formal disjoint union of affine charts, each
with a monomial substitution back to its parent. Overlaps between charts
are not modeled; every check the engine runs is chart-local.

Blowing up a leaf chart along V(x_i : i ∈ T) creates one child per j ∈ T:

    x_j ← x_j,   x_i ← x_j·x_i  (i ∈ T∖{j}),   x_k ← x_k otherwise

and x_j is flagged exceptional in that child. Chart ids are assigned in
creation order; children of one blowup are created by ascending branch
variable. All indices are zero-based in code and one-based in JSON.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    ArityError,
    ChartNotFoundError,
    InvalidCenterError,
    NotLeafError,
)
from .monomials import Monomial, MonomialIdeal, minimalize, substitute, variable

logger = logging.getLogger(__name__)

Center = frozenset[int]


@dataclass(frozen=True)
class Chart:
    id: int
    parent_id: Optional[int]
    arity: int
    # parent variable k ↦ monomial in this chart's variables
    substitution: tuple[Monomial, ...]
    exceptional: tuple[bool, ...]
    center_of_birth: Optional[Center] = None
    branch_var: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "parent": self.parent_id,
            "center": sorted(i + 1 for i in self.center_of_birth) if self.center_of_birth else None,
            "branch": None if self.branch_var is None else self.branch_var + 1,
            "substitution": [list(m) for m in self.substitution],
            "exceptional": list(self.exceptional),
        }


@dataclass(frozen=True)
class BlowupStep:
    """One orbit of centers, at most one per chart, sorted by chart id."""

    centers: tuple[tuple[int, Center], ...]
    orbit_tag: Optional[str] = None

    @classmethod
    def of(cls, centers: Iterable[tuple[int, Iterable[int]]], orbit_tag: Optional[str] = None) -> "BlowupStep":
        normalized = sorted((c, frozenset(T)) for c, T in centers)
        charts = [c for c, _ in normalized]
        if len(set(charts)) != len(charts):
            raise InvalidCenterError(
                "A step may hold at most one center per chart (coordinate centers on one chart meet at the origin)",
                charts=charts,
            )
        return cls(tuple(normalized), orbit_tag)

    def center_on(self, chart_id: int) -> Optional[Center]:
        for c, T in self.centers:
            if c == chart_id:
                return T
        return None

    def to_json(self) -> dict:
        return {
            "centers": [{"chart": c, "center": sorted(i + 1 for i in T)} for c, T in self.centers],
            "orbit_tag": self.orbit_tag,
        }


class BlowupTower:
    """Tree of charts built by successive blowup steps."""

    def __init__(self, arity: int, variable_names: Optional[Sequence[str]] = None):
        if arity < 1:
            raise ArityError("A tower needs at least one variable")
        self.arity = arity
        self.variable_names = list(variable_names or [f"x{k + 1}" for k in range(arity)])
        if len(self.variable_names) != arity:
            raise ArityError(f"{len(self.variable_names)} variable names for arity {arity}")

        identity = tuple(variable(k, arity) for k in range(arity))
        root = Chart(0, None, arity, identity, (False,) * arity)
        self.charts: dict[int, Chart] = {0: root}
        self.children: dict[int, dict[int, int]] = {}
        self.steps: list[BlowupStep] = []
        self._leaves: set[int] = {0}
        self._composite: dict[int, tuple[Monomial, ...]] = {0: identity}

    @property
    def root_id(self) -> int:
        return 0

    # ─── Queries ───

    def chart(self, chart_id: int) -> Chart:
        try:
            return self.charts[chart_id]
        except KeyError:
            raise ChartNotFoundError(f"Unknown chart {chart_id}", chart=chart_id) from None

    def leaves(self) -> list[int]:
        return sorted(self._leaves)

    def is_leaf(self, chart_id: int) -> bool:
        return chart_id in self._leaves

    def ancestors(self, chart_id: int) -> list[int]:
        """Chain from `chart_id` up to the root, inclusive."""
        chain = [chart_id]
        while (parent := self.chart(chain[-1]).parent_id) is not None:
            chain.append(parent)
        return chain

    def blowup_count(self) -> int:
        return sum(len(step.centers) for step in self.steps)

    def composite_substitution(self, chart_id: int) -> tuple[Monomial, ...]:
        """Root variable k ↦ monomial in this chart's variables."""
        if chart_id not in self._composite:
            chart = self.chart(chart_id)
            parent = self.composite_substitution(chart.parent_id)
            self._composite[chart_id] = tuple(substitute(m, chart.substitution) for m in parent)
        return self._composite[chart_id]

    def relative_substitution(self, ancestor_id: int, chart_id: int) -> tuple[Monomial, ...]:
        """Ancestor variable k ↦ monomial in `chart_id`'s variables."""
        chain = self.ancestors(chart_id)
        if ancestor_id not in chain:
            raise ChartNotFoundError(f"Chart {ancestor_id} is not an ancestor of {chart_id}")
        images = tuple(variable(k, self.arity) for k in range(self.arity))
        for cid in reversed(chain[: chain.index(ancestor_id)]):
            subst = self.charts[cid].substitution
            images = tuple(substitute(m, subst) for m in images)
        return images

    def pullback(self, chart_id: int, ideal: MonomialIdeal, source_id: int = 0) -> MonomialIdeal:
        """Total transform of `ideal` (given on `source_id`) to `chart_id`."""
        if ideal.arity != self.arity:
            raise ArityError(f"Ideal arity {ideal.arity} does not match tower arity {self.arity}")
        images = self.relative_substitution(source_id, chart_id)
        return minimalize(substitute(g, images) for g in ideal.generators)

    def total_transform(self, leaf_id: int, ideal: MonomialIdeal) -> MonomialIdeal:
        if leaf_id not in self.charts:
            raise ChartNotFoundError(f"Unknown leaf {leaf_id}", chart=leaf_id)
        if leaf_id not in self._leaves:
            raise NotLeafError(f"Chart {leaf_id} is not a leaf", chart=leaf_id)
        if ideal.arity != self.arity:
            raise ArityError(f"Ideal arity {ideal.arity} does not match tower arity {self.arity}")
        images = self.composite_substitution(leaf_id)
        return minimalize(substitute(g, images) for g in ideal.generators)

    # ─── Construction ───

    def blow_up(self, chart_id: int, center: Iterable[int]) -> list[int]:
        """Blow up leaf `chart_id` along V(x_i : i ∈ center); returns new chart ids."""
        chart = self.chart(chart_id)
        if chart_id not in self._leaves:
            raise NotLeafError(f"Chart {chart_id} already blown up", chart=chart_id)
        center = frozenset(center)
        if len(center) < 2:
            raise InvalidCenterError(f"Center {sorted(center)} has codimension < 2", chart=chart_id)
        if not all(0 <= i < self.arity for i in center):
            raise InvalidCenterError(f"Center {sorted(center)} outside variables 0..{self.arity - 1}")

        new_ids = []
        for j in sorted(center):
            images = []
            for k in range(self.arity):
                m = list(variable(k, self.arity))
                if k in center and k != j:
                    m[j] = 1
                images.append(tuple(m))
            flags = list(chart.exceptional)
            flags[j] = True
            child = Chart(
                id=len(self.charts),
                parent_id=chart_id,
                arity=self.arity,
                substitution=tuple(images),
                exceptional=tuple(flags),
                center_of_birth=center,
                branch_var=j,
            )
            self.charts[child.id] = child
            self.children.setdefault(chart_id, {})[j] = child.id
            self._leaves.add(child.id)
            new_ids.append(child.id)

        self._leaves.discard(chart_id)
        logger.debug(f"Blew up chart {chart_id} along {sorted(center)} → charts {new_ids}")
        return new_ids

    def apply_step(self, step: BlowupStep) -> list[int]:
        for c, _ in step.centers:
            if c not in self._leaves:
                raise NotLeafError(f"Step centers must sit on current leaves; chart {c} is not one", chart=c)
        new_ids = []
        for c, T in step.centers:
            new_ids.extend(self.blow_up(c, T))
        self.steps.append(step)
        logger.info(f"Step {len(self.steps)} [{step.orbit_tag}]: {len(step.centers)} center(s), "
                    f"{len(self._leaves)} leaves")
        return new_ids

    def child(self, chart_id: int, branch_var: int) -> int:
        try:
            return self.children[chart_id][branch_var]
        except KeyError:
            raise ChartNotFoundError(f"Chart {chart_id} has no child on branch {branch_var}") from None

    def to_json(self) -> dict:
        return {
            "charts": [self.charts[k].to_json() for k in sorted(self.charts)],
            "steps": [s.to_json() for s in self.steps],
            "leaves": self.leaves(),
        }

    @classmethod
    def replay(cls, arity: int, variable_names: Sequence[str], steps: Iterable[BlowupStep]) -> "BlowupTower":
        tower = cls(arity, variable_names)
        for step in steps:
            tower.apply_step(step)
        return tower


def new_root(arity: int, variable_names: Optional[Sequence[str]] = None) -> BlowupTower:
    return BlowupTower(arity, variable_names)


# ═══════════════════════════════════════════
# Ideal sheaves on the chart forest
# ═══════════════════════════════════════════

@dataclass
class IdealSheaf:
    """
    An ideal given chart-wise on some charts of a tower.

    The value on any other chart is the total transform from its nearest
    ancestor that carries a value. A root ideal is the sheaf {root: I}.
    """

    values: dict[int, MonomialIdeal] = field(default_factory=dict)

    @classmethod
    def at_root(cls, ideal: MonomialIdeal) -> "IdealSheaf":
        return cls({0: ideal})

    def value_at(self, tower: BlowupTower, chart_id: int) -> MonomialIdeal:
        for cid in tower.ancestors(chart_id):
            if cid in self.values:
                if cid == chart_id:
                    return self.values[cid]
                return tower.pullback(chart_id, self.values[cid], source_id=cid)
        raise ChartNotFoundError(f"Sheaf has no value above chart {chart_id}")


def as_sheaf(ideal: Union[MonomialIdeal, IdealSheaf]) -> IdealSheaf:
    return ideal if isinstance(ideal, IdealSheaf) else IdealSheaf.at_root(ideal)
