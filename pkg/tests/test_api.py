"""
HTTP API Tests
==============
Run: pytest tests/test_api.py -v
"""

import json
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import httpx
import pytest
from fastapi.testclient import TestClient

from api.main import app
from engine.settings import reload_settings

BASE = Path(__file__).parent.parent
client = TestClient(app)


def _load(name: str) -> dict:
    return json.loads((BASE / "problems" / f"{name}.json").read_text())


def test_health():
    """Health reports the loaded problems and message templates."""
    response = client.get("/api/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "healthy"
    assert body["problems_loaded"] == len(list((BASE / "problems").glob("*.json")))
    assert body["messages_loaded"] == 3


def test_list_and_get_problems():
    """Sample problems are listed by name; unknown names are 404."""
    names = [p["name"] for p in client.get("/api/problems").json()]
    assert "worked_pair" in names and names == sorted(names)
    assert client.get("/api/problems/worked_pair").json()["variables"] == ["x", "y"]
    assert client.get("/api/problems/missing").status_code == 404


def test_run_sample_problem():
    """Running a stored problem returns the report and both summaries."""
    response = client.post("/api/problems/worked_pair/run")
    assert response.status_code == 200
    body = response.json()
    assert body["report"]["summary"] == {"steps": 2, "blowups": 3, "leaves": 4, "stages": 2}
    assert body["summary"].startswith("## Simplified 2 ideal(s) in x, y")
    assert "<table>" in body["summary_html"]


def test_resolve_map():
    """The line map resolves to two regular leaves."""
    response = client.post("/api/resolve-map", json=_load("map_line"))
    assert response.status_code == 200
    leaves = response.json()["report"]["leaves"]
    assert [leaf["regular"] for leaf in leaves] == [True, True]


def test_timing_query_flag():
    """?timing=true adds an integer timing_ms."""
    body = client.post("/api/simplify?timing=true", json=_load("worked_pair")).json()
    assert isinstance(body["report"]["timing_ms"], int)


def test_guard_is_a_conflict():
    """A tripped step guard answers 409."""
    response = client.post("/api/simplify?max_steps=1", json=_load("worked_pair"))
    assert response.status_code == 409
    assert response.json()["code"] == "termination_guard"


def test_non_invariant_collection_is_unprocessable():
    """A group that moves the collection outside itself answers 422."""
    problem = {"variables": ["x", "y"], "ideals": [[[1, 0], [0, 2]]], "group": [{"vars": [2, 1]}]}
    response = client.post("/api/simplify", json=problem)
    assert response.status_code == 422
    assert response.json()["code"] == "not_invariant"


def test_inconsistent_problem_lists_diagnostics():
    """Arity mismatches come back as diagnostics."""
    response = client.post("/api/simplify", json={"variables": ["x", "y"], "ideals": [[[1, 0, 0]]]})
    assert response.status_code == 422
    body = response.json()
    assert body["code"] == "invalid_problem"
    assert body["diagnostics"][0]["code"] == "arity_mismatch"


def test_verify_round_trip():
    """A fresh report verifies over HTTP."""
    problem = _load("worked_pair")
    report = client.post("/api/simplify", json=problem).json()["report"]
    response = client.post("/api/verify", json={"problem": problem, "report": report})
    assert response.status_code == 200
    assert response.json()["verified"] is True
    assert response.json()["summary"].startswith("**Verified.**")


def test_verify_stale_report():
    """A report checked against another problem is stale."""
    report = client.post("/api/simplify", json=_load("worked_pair")).json()["report"]
    response = client.post("/api/verify", json={"problem": _load("triangle_c3"), "report": report})
    assert response.status_code == 422
    assert response.json()["code"] == "stale_report"


def test_verify_tampered_map_report():
    """An edited leaf map answers 200 with witnesses instead of a server error."""
    problem = _load("map_line")
    report = client.post("/api/resolve-map", json=problem).json()["report"]
    report["leaves"][0]["reduced"] = [[0, 0]]
    del report["leaves"][1]["common_factor"]
    response = client.post("/api/verify", json={"problem": problem, "report": report})
    assert response.status_code == 200
    body = response.json()
    assert body["verified"] is False
    assert body["summary"].startswith("**Not verified.**")
    assert {"path": "leaves[1]", "reason": "shape"} in body["witnesses"]
    assert any(w["path"] == "leaves[1]" and w["reason"].startswith("malformed") for w in body["witnesses"])


def test_info_and_reload():
    """Info shows the group order; reload re-reads the templates."""
    info = client.get("/api/info?problem=triangle_s3").json()
    assert info["group_order"] == 6
    assert "SIMPLIFY_SUMMARY" in info["templates"]
    assert client.post("/api/reload").json()["status"] == "reloaded"


@pytest.mark.asyncio
async def test_async_client_runs_problem():
    """The app also serves an async client."""
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, base_url="http://test") as ac:
        response = await ac.post("/api/resolve-map", json=_load("map_conic"))
    assert response.status_code == 200
    assert response.json()["report"]["summary"]["regular"] is True


def test_log_level_comes_from_settings(monkeypatch):
    """LOG_LEVEL is read through the settings layer the server configures logging from."""
    monkeypatch.setenv("LOG_LEVEL", "DEBUG")
    assert reload_settings().log_level == "DEBUG"
    monkeypatch.delenv("LOG_LEVEL")
    assert reload_settings().log_level == "INFO"
