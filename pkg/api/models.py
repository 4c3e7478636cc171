"""Pydantic models for problem files, reports and HTTP schemas."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt

ExponentVector = list[NonNegativeInt]


class GroupElementModel(BaseModel):
    """One group generator as one-based image lists."""
    model_config = ConfigDict(extra="forbid")

    vars: list[int] = Field(description="Image of each variable (one-based)")
    ideals: Optional[list[int]] = Field(default=None, description="Image of each ideal index (one-based)")
    coords: Optional[list[int]] = Field(default=None, description="Image of each map coordinate (one-based)")


class ProblemFile(BaseModel):
    """A simplification or map-resolution problem."""
    model_config = ConfigDict(extra="forbid")

    variables: list[str] = Field(..., min_length=1, description="Variable names; fixes the arity")
    ideals: list[list[ExponentVector]] = Field(
        default_factory=list,
        description="Collection of ideals, each a list of generator exponent vectors",
        json_schema_extra={"examples": [[[[1, 0], [0, 2]], [[2, 0], [0, 1]]]]},
    )
    group: list[GroupElementModel] = Field(default_factory=list, description="Group generators")
    map: Optional[list[ExponentVector]] = Field(default=None, description="Map coordinates [f_0 : … : f_m]")
    mode: Literal["simplify", "resolve-map"] = "simplify"
    max_steps: Optional[NonNegativeInt] = Field(default=None, description="Step guard (default from settings)")
    stop_when_principal: bool = Field(default=True, description="End the run once every member is principal")


class RunReport(BaseModel):
    """Deterministic run report; every number is an integer, indices are one-based."""
    model_config = ConfigDict(extra="forbid")

    engine_version: str
    input_hash: str
    mode: Literal["simplify", "resolve-map"]
    variables: list[str]
    tower: dict
    leaves: list[dict]
    equivariance: list[dict]
    summary: dict
    collection: Optional[dict] = None
    stages: Optional[list[dict]] = None
    map: Optional[dict] = None
    timing_ms: Optional[int] = None


class VerifyRequest(BaseModel):
    problem: ProblemFile
    report: RunReport


class VerifyResponse(BaseModel):
    verified: bool
    witnesses: list[dict]
    summary: str = Field(default="", description="Markdown summary")


class RunResponse(BaseModel):
    """Report plus a rendered summary."""
    report: RunReport
    summary: str = Field(description="Markdown summary")
    summary_html: str = Field(description="HTML-rendered summary")


class ProblemSummary(BaseModel):
    name: str
    mode: str
    variables: list[str]
    ideals: int
    group_generators: int


class HealthResponse(BaseModel):
    status: str
    engine_version: str
    problems_loaded: int
    messages_loaded: int
    max_steps: int
