"""
Report Verification
===================
Checks a run report against its problem without trusting anything the
report claims: the recorded steps are replayed onto a fresh root, every
chart, pullback and stage condition is recomputed and compared, and the
group action is lifted to the replayed tower again.

Each mismatch becomes a witness {path, reason}; an empty list means the
report is verified.
"""

import logging
from typing import Any, Callable

from api.models import ProblemFile, RunReport
from api.pipeline import build_collection, build_group, build_map
from api.problem_io import input_hash
from engine import __version__
from engine.charts import BlowupStep, BlowupTower, IdealSheaf
from engine.equivariance import transport_tower
from engine.errors import EngineError, StaleReportError
from engine.maps import LeafMap, ResolvedMap, base_ideal, verify_resolution
from engine.monomials import MonomialIdeal, is_locally_principal
from engine.simplifier import (
    canonical_order,
    check_depth_condition,
    stage_ideal,
    verify_stalk_formula,
    weak_transforms,
)

logger = logging.getLogger(__name__)


def _witness(path: str, reason: str, **extra: Any) -> dict:
    return {"path": path, "reason": reason, **extra}


def _checked(path: str, check: Callable[..., list[dict]], *args) -> list[dict]:
    """Run one section of the comparison; a malformed section becomes a single witness."""
    try:
        return check(*args)
    except (EngineError, KeyError, TypeError, ValueError, IndexError) as e:
        reason = e.message if isinstance(e, EngineError) else f"malformed section: {e!r}"
        return [_witness(path, reason)]


def recorded_steps(report: RunReport) -> list[BlowupStep]:
    return [
        BlowupStep.of(((c["chart"], [i - 1 for i in c["center"]]) for c in step["centers"]), step.get("orbit_tag"))
        for step in report.tower.get("steps", [])
    ]


def replay_tower(report: RunReport) -> BlowupTower:
    """The tower obtained by replaying the recorded steps onto a fresh root."""
    return BlowupTower.replay(len(report.variables), report.variables, recorded_steps(report))


def _compare_charts(tower: BlowupTower, report: RunReport) -> list[dict]:
    witnesses = []
    recorded = report.tower.get("charts", [])
    if len(recorded) != len(tower.charts):
        witnesses.append(_witness("tower.charts", f"expected {len(tower.charts)} charts, found {len(recorded)}"))
    for k, data in enumerate(recorded):
        chart_id = data.get("id")
        if chart_id not in tower.charts:
            witnesses.append(_witness(f"tower.charts[{k}].id", f"no chart {chart_id} after replay"))
            continue
        expected = tower.chart(chart_id).to_json()
        for key, value in expected.items():
            if data.get(key) != value:
                witnesses.append(_witness(f"tower.charts[{k}].{key}", f"expected {value}, found {data.get(key)}"))
    if report.tower.get("leaves") != tower.leaves():
        witnesses.append(_witness("tower.leaves", f"expected {tower.leaves()}"))
    return witnesses


def _compare_equivariance(problem: ProblemFile, tower: BlowupTower, report: RunReport) -> list[dict]:
    witnesses = []
    recorded = {tuple((e.get("element") or {}).get("vars") or ()): e for e in report.equivariance}
    for g in build_group(problem):
        path = f"equivariance[{g.to_json()['vars']}]"
        try:
            phi = transport_tower(g, tower)
        except EngineError as e:
            witnesses.append(_witness(path, e.message))
            continue
        entry = recorded.get(tuple(g.to_json()["vars"]))
        if entry is None:
            witnesses.append(_witness(path, "group element missing from report"))
        elif entry.get("chart_map") != [[c, phi[c]] for c in sorted(phi)]:
            witnesses.append(_witness(f"{path}.chart_map", "chart bijection differs from the recomputed lift"))
    return witnesses


def _verify_leaves(tower: BlowupTower, canon: list[MonomialIdeal], report: RunReport) -> list[dict]:
    witnesses = []
    recorded = {leaf.get("chart"): leaf for leaf in report.leaves}
    for leaf in tower.leaves():
        data = recorded.get(leaf)
        if data is None:
            witnesses.append(_witness(f"leaves[{leaf}]", "leaf missing from report"))
            continue
        pullbacks = [tower.total_transform(leaf, I) for I in canon]
        for j, I in enumerate(pullbacks):
            if not is_locally_principal(I):
                witnesses.append(_witness(f"leaves[{leaf}].pullbacks[{j}]", "pullback is not principal"))
        if data.get("pullbacks") != [I.to_json() for I in pullbacks]:
            witnesses.append(_witness(f"leaves[{leaf}].pullbacks", "pullbacks differ from recomputation"))
    return witnesses


def _verify_stages(problem: ProblemFile, report: RunReport, canon: list[MonomialIdeal],
                   steps: list[BlowupStep]) -> list[dict]:
    """Rebuild the tower stage by stage and re-check every stage condition."""
    witnesses = []
    tower = BlowupTower(len(problem.variables), problem.variables)
    current = [IdealSheaf.at_root(I) for I in canon]
    applied = 0
    for k, stage in enumerate(report.stages or []):
        path = f"stages[{k}]"
        i, span = stage.get("i"), stage.get("steps")
        if not isinstance(i, int) or not 2 <= i <= len(canon) + 1:
            witnesses.append(_witness(f"{path}.i", f"expected a depth between 2 and {len(canon) + 1}, found {i}"))
            return witnesses
        if not (isinstance(span, list) and len(span) == 2 and all(isinstance(s, int) for s in span)):
            witnesses.append(_witness(f"{path}.steps", f"expected a [first, last] step range, found {span}"))
            return witnesses
        values = {leaf: [s.value_at(tower, leaf) for s in current] for leaf in tower.leaves()}
        holds, _ = check_depth_condition(values, i)
        if not holds:
            witnesses.append(_witness(path, f"depth condition fails on entry to stage {i}"))

        J = IdealSheaf(stage_ideal(values, i))
        if stage.get("stage_ideal") != {str(c): I.to_json() for c, I in sorted(J.values.items())}:
            witnesses.append(_witness(f"{path}.stage_ideal", "stage ideal differs from recomputation"))

        first, last = span
        if first != applied or last < first or last > len(steps):
            witnesses.append(_witness(f"{path}.steps", f"step range {[first, last]} does not follow {applied}"))
            return witnesses
        for step in steps[first:last]:
            tower.apply_step(step)
        applied = last

        try:
            after, _ = weak_transforms(tower, current, J, i)
        except EngineError as e:
            witnesses.append(_witness(path, e.message))
            return witnesses
        recorded = [{str(c): I.to_json() for c, I in sorted(s.values.items())} for s in after]
        if stage.get("weak_transforms") != recorded:
            witnesses.append(_witness(f"{path}.weak_transforms", "weak transforms differ from recomputation"))
        holds, _ = check_depth_condition({leaf: [s.value_at(tower, leaf) for s in after]
                                          for leaf in tower.leaves()}, i - 1)
        if not holds:
            witnesses.append(_witness(path, f"depth condition fails at level {i - 1} on exit"))
        ok, _ = verify_stalk_formula(tower, current, after)
        if not ok:
            witnesses.append(_witness(f"{path}.stalk_formula", "weak transforms change principality"))
        current = after

    if applied != len(steps):
        witnesses.append(_witness("stages", f"{len(steps) - applied} step(s) belong to no stage"))
    return witnesses


def _verify_map(problem: ProblemFile, tower: BlowupTower, report: RunReport) -> list[dict]:
    spec = build_map(problem, build_group(problem))
    witnesses = []
    if (report.map or {}).get("base_ideal") != base_ideal(spec).to_json():
        witnesses.append(_witness("map.base_ideal", "base ideal differs from recomputation"))
    leaves = {}
    for k, data in enumerate(report.leaves):
        try:
            leaves[data["chart"]] = LeafMap(
                tuple(data["common_factor"]),
                tuple(tuple(m) for m in data["reduced"]),
                bool(data["regular"]),
            )
        except (KeyError, TypeError) as e:
            witnesses.append(_witness(f"leaves[{k}]", f"malformed leaf map: {e!r}"))
    ok, found = verify_resolution(ResolvedMap(spec, tower, leaves))
    if not ok:
        witnesses.extend(_witness(f"leaves[{w['leaf']}]", w["check"]) for w in found)
    return witnesses


def verify(report: RunReport, problem: ProblemFile) -> tuple[bool, list[dict]]:
    """
    Verify `report` against `problem`.

    Raises StaleReportError when the report was computed from different input.
    A different engine version is only logged; the content is still checked.
    """
    expected = input_hash(problem)
    if report.input_hash != expected:
        raise StaleReportError("Report was computed from a different problem",
                               expected=expected, found=report.input_hash)
    if report.engine_version != __version__:
        logger.warning(f"Report engine version {report.engine_version} differs from {__version__}")
    if report.mode != problem.mode:
        return False, [_witness("mode", f"expected {problem.mode}, found {report.mode}")]

    try:
        steps = recorded_steps(report)
        tower = BlowupTower.replay(len(problem.variables), problem.variables, steps)
    except (EngineError, KeyError, TypeError) as e:
        reason = e.message if isinstance(e, EngineError) else f"malformed step: {e}"
        return False, [_witness("tower.steps", reason)]

    witnesses = _checked("tower.charts", _compare_charts, tower, report)
    witnesses += _checked("equivariance", _compare_equivariance, problem, tower, report)
    if problem.mode == "simplify":
        collection = build_collection(problem)
        canon = [collection[k] for k in canonical_order(collection)]
        witnesses += _checked("leaves", _verify_leaves, tower, canon, report)
        witnesses += _checked("stages", _verify_stages, problem, report, canon, steps)
    else:
        witnesses += _checked("leaves", _verify_map, problem, tower, report)

    logger.info(f"Verification finished with {len(witnesses)} witness(es)")
    return not witnesses, witnesses
