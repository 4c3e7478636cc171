"""
Run Pipeline
============
Dispatches a validated problem to the collection simplifier or the map
resolver and assembles the deterministic RunReport:

    problem → group closure → simplify_collection | resolve → report
"""

import logging
import time
from typing import Optional

from api.models import ProblemFile, RunReport
from api.problem_io import input_hash
from engine import __version__
from engine.charts import BlowupTower
from engine.equivariance import GroupAction, GroupElement, closure, transport_all
from engine.maps import RationalMapSpec, ResolvedMap, base_ideal, resolve
from engine.message_resolver import MessageResolver
from engine.monomials import MonomialIdeal, is_locally_principal, minimalize
from engine.principalizer import normal_crossing_certificate
from engine.settings import get_settings
from engine.simplifier import SimplificationResult, simplify_collection

logger = logging.getLogger(__name__)


def build_group(problem: ProblemFile) -> GroupAction:
    generators = [GroupElement.from_json(g.model_dump()) for g in problem.group]
    return closure(generators, len(problem.variables))


def build_collection(problem: ProblemFile) -> list[MonomialIdeal]:
    return [minimalize(gens) for gens in problem.ideals]


def build_map(problem: ProblemFile, group: GroupAction) -> RationalMapSpec:
    return RationalMapSpec.of(problem.map or [], group)


def effective_max_steps(problem: ProblemFile, override: Optional[int] = None) -> int:
    if override is not None:
        return override
    if problem.max_steps is not None:
        return problem.max_steps
    return get_settings().max_steps


def _chart_map(phi: dict[int, int]) -> list[list[int]]:
    return [[c, phi[c]] for c in sorted(phi)]


def _one_based(sigma) -> list[int]:
    return [k + 1 for k in sigma]


def _tower_summary(tower: BlowupTower) -> dict:
    return {"steps": len(tower.steps), "blowups": tower.blowup_count(), "leaves": len(tower.leaves())}


# ═══════════════════════════════════════════
# Report assembly
# ═══════════════════════════════════════════

def simplify_report(result: SimplificationResult) -> dict:
    tower = result.tower
    leaves = []
    for leaf, pullbacks in result.leaf_pullbacks().items():
        generators = [I.generators[0] for I in pullbacks]
        leaves.append({
            "chart": leaf,
            "pullbacks": [I.to_json() for I in pullbacks],
            "principal_generators": [list(g) for g in generators],
            "normal_crossings": [normal_crossing_certificate(tower, leaf, g) for g in generators],
        })
    equivariance = [
        {
            "element": g.to_json(),
            "ideal_permutation": _one_based(result.sigmas[g]),
            "chart_map": _chart_map(phi),
        }
        for g, phi in sorted(result.transports.items(), key=lambda item: item[0].sort_key())
    ]
    return {
        "collection": {
            "input_order": _one_based(result.input_order),
            "ideals": [I.to_json() for I in result.collection],
            "stopped_early": result.stopped_early,
        },
        "tower": tower.to_json(),
        "leaves": leaves,
        "stages": [{**stage.to_json(), "provenance": stage.provenance} for stage in result.stages],
        "equivariance": equivariance,
        "summary": {**_tower_summary(tower), "stages": len(result.stages)},
    }


def map_report(resolved: ResolvedMap) -> dict:
    spec, tower = resolved.spec, resolved.tower
    base = base_ideal(spec)
    leaves = []
    for leaf, data in sorted(resolved.leaves.items()):
        pulled = tower.total_transform(leaf, base)
        leaves.append({
            "chart": leaf,
            **data.to_json(),
            "base_ideal_pullback": pulled.to_json(),
            "base_ideal_principal": is_locally_principal(pulled),
        })
    sigmas = spec.coordinate_permutations()
    equivariance = [
        {
            "element": g.to_json(),
            "coordinate_permutation": _one_based(sigmas[g]),
            "chart_map": _chart_map(phi),
        }
        for g, phi in sorted(transport_all(spec.group, tower).items(), key=lambda item: item[0].sort_key())
    ]
    return {
        "map": {
            "coordinates": [list(f) for f in spec.coordinates],
            "base_ideal": base.to_json(),
        },
        "tower": tower.to_json(),
        "leaves": leaves,
        "equivariance": equivariance,
        "summary": {**_tower_summary(tower), "regular": all(d.regular for d in resolved.leaves.values())},
    }


def run(problem: ProblemFile, max_steps: Optional[int] = None, include_timing: bool = False) -> RunReport:
    """Solve `problem`; EngineError subclasses propagate with their exit codes."""
    started = time.perf_counter()
    steps = effective_max_steps(problem, max_steps)
    group = build_group(problem)
    logger.info(f"Running {problem.mode} on {problem.variables} (group order {group.order}, max_steps {steps})")

    if problem.mode == "simplify":
        result = simplify_collection(build_collection(problem), group, steps, problem.variables,
                                     stop_when_principal=problem.stop_when_principal)
        body = simplify_report(result)
    else:
        resolved = resolve(build_map(problem, group), steps, problem.variables)
        body = map_report(resolved)

    return RunReport(
        engine_version=__version__,
        input_hash=input_hash(problem),
        mode=problem.mode,
        variables=problem.variables,
        timing_ms=int((time.perf_counter() - started) * 1000) if include_timing else None,
        **body,
    )


def summarize(report: RunReport, resolver: MessageResolver) -> Optional[dict]:
    ref = "SIMPLIFY_SUMMARY" if report.mode == "simplify" else "RESOLVE_MAP_SUMMARY"
    return resolver.resolve(ref, report.model_dump(mode="json"))
