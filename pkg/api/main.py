"""
Equivariant Blowup Engine — FastAPI Application
================================================
HTTP surface over the same pipeline the CLI uses. Run with:
    uvicorn api.main:app --reload --port 8000
"""

import logging
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse, JSONResponse

from api.models import (
    HealthResponse, ProblemFile, ProblemSummary,
    RunResponse, VerifyRequest, VerifyResponse,
)
from api.pipeline import build_group, run, summarize
from api.problem_io import consistency_diagnostics, parse_problem
from api.verify import verify
from engine import __version__
from engine.errors import EngineError, ProblemValidationError
from engine.message_resolver import MessageResolver
from engine.settings import get_settings, reload_settings

# ─── Load environment variables ───
load_dotenv()

# ─── Logging ───
logging.basicConfig(
    level=getattr(logging, get_settings().log_level.upper(), logging.INFO),
    format="%(asctime)s | %(levelname)-7s | %(name)s | %(message)s",
    datefmt="%H:%M:%S",
)
logger = logging.getLogger(__name__)

# ─── Resolve paths relative to project root ───
BASE_DIR = Path(__file__).resolve().parent.parent
PROBLEMS_DIR = BASE_DIR / "problems"
MESSAGES_DIR = BASE_DIR / "messages"

logger.info(f"Base directory: {BASE_DIR}")
logger.info(f"Problems dir: {PROBLEMS_DIR}")
logger.info(f"Messages dir: {MESSAGES_DIR}")


def load_problems(directory: Path = PROBLEMS_DIR) -> dict[str, ProblemFile]:
    """Sample problems by file stem; invalid files are logged and skipped."""
    problems = {}
    for path in sorted(directory.glob("*.json")):
        try:
            problems[path.stem] = parse_problem(path.read_bytes())
        except ProblemValidationError as e:
            logger.warning(f"Skipping {path.name}: {e.message} {e.diagnostics}")
    logger.info(f"Loaded {len(problems)} sample problems from {directory}")
    return problems


# ─── Initialize components ───
problems = load_problems()
message_resolver = MessageResolver(str(MESSAGES_DIR))

# ─── FastAPI App ───
app = FastAPI(
    title="Equivariant Blowup Engine",
    description=(
        "Equivariant simplification of finite collections of monomial ideals "
        "and resolution of equivariant monomial maps by toric blowups."
    ),
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(EngineError)
async def engine_error_handler(request: Request, exc: EngineError):
    """Guard and stage failures are conflicts (409); everything else is unprocessable (422)."""
    status = 409 if exc.exit_code == 2 else 422
    logger.info(f"{request.url.path}: {exc.code} ({exc.message})")
    return JSONResponse(status_code=status, content=exc.to_dict())


def _validated(problem: ProblemFile, mode: Optional[str] = None) -> ProblemFile:
    if mode and mode != problem.mode:
        problem = problem.model_copy(update={"mode": mode})
    diagnostics = consistency_diagnostics(problem)
    if diagnostics:
        raise ProblemValidationError(f"Problem has {len(diagnostics)} inconsistency(ies)", diagnostics)
    return problem


def _respond(problem: ProblemFile, max_steps: Optional[int], timing: bool) -> RunResponse:
    report = run(problem, max_steps=max_steps, include_timing=timing)
    rendered = summarize(report, message_resolver) or {"markdown": "", "html": ""}
    return RunResponse(report=report, summary=rendered["markdown"], summary_html=rendered["html"])


# ═══════════════════════════════════════════
# ROUTES
# ═══════════════════════════════════════════

@app.get("/", response_class=HTMLResponse)
async def root():
    return HTMLResponse(content="<h1>Equivariant Blowup Engine</h1><p>Visit /docs for API documentation.</p>")


@app.post("/api/simplify", response_model=RunResponse)
def simplify(problem: ProblemFile, max_steps: Optional[int] = None, timing: bool = False):
    """
    Simplify a G-invariant collection of monomial ideals.

    **Example body**:
    ```json
    {
        "variables": ["x", "y"],
        "ideals": [[[1, 0], [0, 2]], [[2, 0], [0, 1]]],
        "group": [{"vars": [2, 1], "ideals": [2, 1]}]
    }
    ```
    """
    return _respond(_validated(problem, "simplify"), max_steps, timing)


@app.post("/api/resolve-map", response_model=RunResponse)
def resolve_map(problem: ProblemFile, max_steps: Optional[int] = None, timing: bool = False):
    """Resolve the indeterminacy of a G-equivariant monomial map to projective space."""
    return _respond(_validated(problem, "resolve-map"), max_steps, timing)


@app.post("/api/verify", response_model=VerifyResponse)
def verify_report(request: VerifyRequest):
    """Re-derive a report from its problem; 422 with `stale_report` when the input hash differs."""
    ok, witnesses = verify(request.report, _validated(request.problem))
    rendered = message_resolver.resolve("VERIFY_SUMMARY", {"verified": ok, "witnesses": witnesses})
    return VerifyResponse(verified=ok, witnesses=witnesses, summary=rendered["markdown"] if rendered else "")


@app.get("/api/problems", response_model=list[ProblemSummary])
async def list_problems():
    return [
        ProblemSummary(
            name=name,
            mode=p.mode,
            variables=p.variables,
            ideals=len(p.ideals),
            group_generators=len(p.group),
        )
        for name, p in sorted(problems.items())
    ]


@app.get("/api/problems/{name}", response_model=ProblemFile)
async def get_problem(name: str):
    problem = problems.get(name)
    if problem is None:
        raise HTTPException(status_code=404, detail=f"Problem not found: {name}")
    return problem


@app.post("/api/problems/{name}/run", response_model=RunResponse)
def run_problem(name: str, max_steps: Optional[int] = None, timing: bool = False):
    problem = problems.get(name)
    if problem is None:
        raise HTTPException(status_code=404, detail=f"Problem not found: {name}")
    return _respond(problem, max_steps, timing)


@app.get("/api/info")
async def info(problem: Optional[str] = None):
    body = {
        "engine_version": __version__,
        "settings": get_settings().model_dump(),
        "modes": ["simplify", "resolve-map"],
        "templates": message_resolver.list_templates(),
    }
    if problem is not None:
        if problem not in problems:
            raise HTTPException(status_code=404, detail=f"Problem not found: {problem}")
        body["group_order"] = build_group(problems[problem]).order
    return body


@app.post("/api/reload")
async def reload():
    """Re-read settings, sample problems and summary templates from disk."""
    global problems
    reload_settings()
    problems = load_problems()
    message_resolver.reload()
    return {
        "status": "reloaded",
        "problems_count": len(problems),
        "messages_count": len(message_resolver.cache),
    }


@app.get("/api/health", response_model=HealthResponse)
async def health():
    return HealthResponse(
        status="healthy",
        engine_version=__version__,
        problems_loaded=len(problems),
        messages_loaded=len(message_resolver.cache),
        max_steps=get_settings().max_steps,
    )


# ─── Startup ───
@app.on_event("startup")
async def startup():
    logger.info("=" * 60)
    logger.info(f"Equivariant Blowup Engine {__version__} — Starting")
    logger.info(f"  Problems loaded: {len(problems)}")
    logger.info(f"  Messages loaded: {len(message_resolver.cache)}")
    logger.info(f"  Step guard: {get_settings().max_steps}")
    logger.info(f"  API Docs: http://localhost:8000/docs")
    logger.info("=" * 60)
