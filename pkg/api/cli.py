"""
Command-line interface
======================
    python -m api.cli simplify problems/worked_pair.json --dot tower.dot
    python -m api.cli resolve-map problems/map_line.json --out report.json
    python -m api.cli run --batch problems/ --out reports/
    python -m api.cli verify problems/worked_pair.json report.json
    python -m api.cli info [problem.json]

The report goes to stdout (or --out) as canonical JSON. Exit codes:
0 success, 1 invalid problem or failed verification, 2 guard or stage
invariant failure, 3 invariance failure.
"""

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

from api.models import ProblemFile
from api.pipeline import build_collection, build_group, run, summarize
from api.problem_io import canonical_json, emit_report, parse_problem, parse_report
from api.verify import replay_tower, verify
from engine import __version__
from engine.errors import EngineError
from engine.export import to_dot
from engine.message_resolver import MessageResolver
from engine.settings import get_settings
from engine.simplifier import canonical_order

logger = logging.getLogger("api.cli")

BASE_DIR = Path(__file__).resolve().parent.parent
MESSAGES_DIR = BASE_DIR / "messages"

EXIT_CODES = {
    "0": "success",
    "1": "invalid problem, failed verification or other engine error",
    "2": "termination guard or stage invariant failure",
    "3": "group action inconsistent or not preserving the input",
}


def _configure_logging(verbosity: int):
    level = logging.WARNING if verbosity == 0 else (logging.INFO if verbosity == 1 else logging.DEBUG)
    logging.basicConfig(
        level=level,
        format="%(asctime)s | %(levelname)-7s | %(name)s | %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stderr,
    )


def _fail(err: EngineError, source: str = "") -> int:
    body = err.to_dict()
    if source:
        body["source"] = source
    print(json.dumps(body, sort_keys=True), file=sys.stderr)
    return err.exit_code


def _load_problem(path: Path, mode: Optional[str]) -> ProblemFile:
    problem = parse_problem(path.read_bytes())
    if mode and mode != problem.mode:
        problem = problem.model_copy(update={"mode": mode})
    return problem


def _write(text: str, out: Optional[Path]):
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def _verify_file(problem: ProblemFile, report_path: Path) -> int:
    ok, witnesses = verify(parse_report(report_path.read_bytes()), problem)
    sys.stdout.write(canonical_json({"verified": ok, "witnesses": witnesses}))
    return 0 if ok else 1


def _solve(args, problem_path: Path, out: Optional[Path]) -> int:
    """One isolated problem instance: parse, run, emit. Returns the exit code."""
    try:
        problem = _load_problem(problem_path, args.mode)
        if args.verify_only:
            return _verify_file(problem, Path(args.verify_only))
        report = run(problem, max_steps=args.max_steps, include_timing=args.timing)
    except EngineError as e:
        return _fail(e, str(problem_path))

    _write(emit_report(report, include_timing=args.timing), out)
    if args.dot:
        Path(args.dot).write_text(to_dot(replay_tower(report)), encoding="utf-8")
    if args.summary:
        rendered = summarize(report, MessageResolver(str(MESSAGES_DIR)))
        if rendered is not None:
            Path(args.summary).write_text(rendered["markdown"], encoding="utf-8")
    logger.info(f"{problem_path}: {report.summary}")
    return 0


def _run_batch(args) -> int:
    directory = Path(args.batch)
    files = sorted(directory.glob("*.json"))
    if not files:
        print(json.dumps({"code": "nothing_to_do", "detail": f"No *.json problems in {directory}"}), file=sys.stderr)
        return 1
    out_dir = Path(args.out) if args.out else directory
    workers = get_settings().batch_workers
    logger.info(f"Batch of {len(files)} problem(s) on {workers} worker(s)")

    def one(path: Path) -> int:
        return _solve(args, path, out_dir / f"{path.stem}.report.json")

    with ThreadPoolExecutor(max_workers=workers) as pool:
        codes = list(pool.map(one, files))
    for path, code in zip(files, codes):
        print(f"{path.name}: exit {code}", file=sys.stderr)
    return max(codes)


def cmd_solve(args) -> int:
    if args.batch:
        if args.dot or args.summary or args.verify_only:
            print("--batch cannot be combined with --dot, --summary or --verify-only", file=sys.stderr)
            return 1
        return _run_batch(args)
    if not args.problem:
        print("a problem file (or --batch DIR) is required", file=sys.stderr)
        return 1
    return _solve(args, Path(args.problem), Path(args.out) if args.out else None)


def cmd_verify(args) -> int:
    try:
        return _verify_file(_load_problem(Path(args.problem), args.mode), Path(args.report))
    except EngineError as e:
        return _fail(e, args.problem)


def cmd_info(args) -> int:
    settings = get_settings()
    body = {
        "engine_version": __version__,
        "settings": settings.model_dump(),
        "modes": ["simplify", "resolve-map"],
        "exit_codes": EXIT_CODES,
    }
    if args.problem:
        try:
            problem = _load_problem(Path(args.problem), None)
            group = build_group(problem)
            body["problem"] = {
                "mode": problem.mode,
                "variables": problem.variables,
                "group_order": group.order,
                "ideals": len(problem.ideals),
                "map_coordinates": len(problem.map or []),
            }
            if problem.mode == "simplify":
                body["problem"]["canonical_order"] = [k + 1 for k in canonical_order(build_collection(problem))]
        except EngineError as e:
            return _fail(e, args.problem)
    sys.stdout.write(canonical_json(body))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="equiblow", description="Equivariant monomial blowup engine")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    def solve_parser(name: str, mode: Optional[str], help_text: str):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("problem", nargs="?", help="problem JSON file")
        if mode is None:
            p.add_argument("--mode", choices=["simplify", "resolve-map"], default=None,
                           help="override the problem's mode")
        p.set_defaults(mode=mode, func=cmd_solve)
        p.add_argument("--max-steps", type=int, default=None, help="override the step guard")
        p.add_argument("--out", help="report path (a directory with --batch)")
        p.add_argument("--dot", help="write the tower as Graphviz DOT")
        p.add_argument("--summary", help="write a Markdown run summary")
        p.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
        p.add_argument("--verify-only", metavar="REPORT", help="verify REPORT instead of solving")
        p.add_argument("--batch", metavar="DIR", help="solve every *.json problem in DIR concurrently")

    solve_parser("simplify", "simplify", "simplify a G-invariant collection of ideals")
    solve_parser("resolve-map", "resolve-map", "resolve a G-equivariant monomial map")
    solve_parser("run", None, "solve in the problem's own mode")

    p = sub.add_parser("verify", help="re-verify a report against its problem")
    p.add_argument("problem")
    p.add_argument("report")
    p.add_argument("--mode", choices=["simplify", "resolve-map"], default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("info", help="engine version, settings and optional problem summary")
    p.add_argument("problem", nargs="?")
    p.set_defaults(func=cmd_info)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
