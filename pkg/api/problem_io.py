"""
Problem I/O
===========
Parses problem files into validated ProblemFile models and emits canonical
JSON (sorted keys, 2-space indent, integers only) for problems and reports.

Diagnostics carry a field path (`ideals[0][1]`), a stable code and a reason:

    malformed_json      not UTF-8 JSON
    schema              wrong type / missing field / unknown field
    negative_exponent   exponent below zero
    arity_mismatch      vector length differs from the variable count
    zero_ideal          ideal without generators
    bad_permutation     image list is not a permutation of the right size
    missing_field       mode needs `ideals` or `map`
"""

import hashlib
import json
import logging
from typing import Union

from pydantic import ValidationError

from api.models import ProblemFile, RunReport
from engine.errors import ProblemValidationError

logger = logging.getLogger(__name__)


def _path(loc: tuple) -> str:
    out = ""
    for part in loc:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out


def _diagnostic(path: str, code: str, reason: str) -> dict:
    return {"path": path, "code": code, "reason": reason}


def _schema_diagnostics(err: ValidationError) -> list[dict]:
    diagnostics = []
    for e in err.errors():
        loc = tuple(e["loc"])
        code = "schema"
        if e["type"] == "greater_than_equal" and loc and loc[0] in ("ideals", "map"):
            code = "negative_exponent"
        diagnostics.append(_diagnostic(_path(loc), code, e["msg"]))
    return diagnostics


def _is_permutation(images: list[int], size: int) -> bool:
    return sorted(images) == list(range(1, size + 1))


def consistency_diagnostics(problem: ProblemFile) -> list[dict]:
    """Cross-field checks the schema cannot express. Returns a list of diagnostics."""
    diagnostics = []
    n = len(problem.variables)

    if len(set(problem.variables)) != n:
        diagnostics.append(_diagnostic("variables", "schema", "variable names must be unique"))

    for i, ideal in enumerate(problem.ideals):
        if not ideal:
            diagnostics.append(_diagnostic(f"ideals[{i}]", "zero_ideal", "an ideal needs at least one generator"))
        for j, gen in enumerate(ideal):
            if len(gen) != n:
                diagnostics.append(_diagnostic(f"ideals[{i}][{j}]", "arity_mismatch",
                                               f"expected {n} exponents, got {len(gen)}"))

    for k, coord in enumerate(problem.map or []):
        if len(coord) != n:
            diagnostics.append(_diagnostic(f"map[{k}]", "arity_mismatch", f"expected {n} exponents, got {len(coord)}"))

    if problem.mode == "simplify" and not problem.ideals:
        diagnostics.append(_diagnostic("ideals", "missing_field", "simplify mode needs at least one ideal"))
    if problem.mode == "resolve-map" and not problem.map:
        diagnostics.append(_diagnostic("map", "missing_field", "resolve-map mode needs map coordinates"))

    for k, element in enumerate(problem.group):
        if not _is_permutation(element.vars, n):
            diagnostics.append(_diagnostic(f"group[{k}].vars", "bad_permutation",
                                           f"expected a permutation of 1..{n}"))
        if element.ideals is not None and not _is_permutation(element.ideals, len(problem.ideals)):
            diagnostics.append(_diagnostic(f"group[{k}].ideals", "bad_permutation",
                                           f"expected a permutation of 1..{len(problem.ideals)}"))
        if element.coords is not None and not _is_permutation(element.coords, len(problem.map or [])):
            diagnostics.append(_diagnostic(f"group[{k}].coords", "bad_permutation",
                                           f"expected a permutation of 1..{len(problem.map or [])}"))
    return diagnostics


def parse_problem(data: Union[bytes, str]) -> ProblemFile:
    """Validate raw bytes; ProblemValidationError lists every diagnostic found."""
    try:
        text = data.decode("utf-8") if isinstance(data, bytes) else data
        raw = json.loads(text)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ProblemValidationError("Problem is not valid UTF-8 JSON",
                                     [_diagnostic("", "malformed_json", str(e))]) from None

    try:
        problem = ProblemFile.model_validate(raw)
    except ValidationError as e:
        raise ProblemValidationError("Problem failed schema validation", _schema_diagnostics(e)) from None

    diagnostics = consistency_diagnostics(problem)
    if diagnostics:
        raise ProblemValidationError(f"Problem has {len(diagnostics)} inconsistency(ies)", diagnostics)
    logger.debug(f"Parsed {problem.mode} problem over {problem.variables}")
    return problem


def canonical_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def emit_problem(problem: ProblemFile) -> str:
    return canonical_json(problem.model_dump(mode="json"))


def input_hash(problem: ProblemFile) -> str:
    body = json.dumps(problem.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(body.encode("utf-8")).hexdigest()


def emit_report(report: RunReport, include_timing: bool = False) -> str:
    data = report.model_dump(mode="json")
    # unset optional sections are dropped; nulls nested inside sections stay
    body = {k: v for k, v in data.items() if v is not None and (include_timing or k != "timing_ms")}
    return canonical_json(body)


def parse_report(data: Union[bytes, str]) -> RunReport:
    try:
        return RunReport.model_validate_json(data)
    except ValidationError as e:
        raise ProblemValidationError("Report failed schema validation", _schema_diagnostics(e)) from None
