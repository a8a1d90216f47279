"""HTTP front end: a small JSON API over the solvers, oracles, and emitters.

Every endpoint takes the same textual forms the CLI does (formula syntax,
comma-separated model). Malformed input is a 400 with the parser's message;
oracle enumeration past the cap is a 413.
"""

from __future__ import annotations

from typing import List, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .fuzzing import fuzz_run
from .reductions import NonSingletonAssignmentError, emit_pdl_embedding
from .semantics import EnumerationCapError, evaluate, oracle_sat, parse_valuation
from .solver import StarInputError, model_check, sat, valid
from .syntax import ParseError, parse_formula


class McRequest(BaseModel):
    model: str = ""
    formula: str
    algorithm: str = "auto"
    trace: bool = False


class FormulaRequest(BaseModel):
    formula: str
    algorithm: str = "auto"
    trace: bool = False


class VerdictResponse(BaseModel):
    verdict: str
    answer: bool
    trace: Optional[str] = None


class OracleMcRequest(BaseModel):
    model: str = ""
    formula: str


class OracleSatRequest(BaseModel):
    formula: str
    cap: int = Field(default=20, ge=1)


class TranslateRequest(BaseModel):
    formula: str


class TranslateResponse(BaseModel):
    lines: List[str]


class FuzzRequest(BaseModel):
    seed: int = 0
    cases: int = Field(default=100, ge=0)
    max_atoms: int = Field(default=3, ge=1, le=4)
    max_len: int = Field(default=20, ge=1)
    starred: bool = False


class FuzzResponse(BaseModel):
    agree: bool
    report: List[str]


def _parse_formula(text: str):
    try:
        return parse_formula(text)
    except ParseError as e:
        raise HTTPException(status_code=400, detail=str(e))


def _parse_model(text: str):
    try:
        return parse_valuation(text)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


def create_app() -> FastAPI:
    app = FastAPI(title="dlpa", version=__version__)

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/mc", response_model=VerdictResponse)
    def mc(req: McRequest):
        v = _parse_model(req.model)
        f = _parse_formula(req.formula)
        try:
            verdict = model_check(v, f, req.algorithm, want_trace=req.trace)
        except (StarInputError, ValueError) as e:
            raise HTTPException(status_code=400, detail=str(e))
        return VerdictResponse(
            verdict="TRUE" if verdict.answer else "FALSE",
            answer=verdict.answer,
            trace=verdict.trace.serialize() if req.trace else None)

    @app.post("/sat", response_model=VerdictResponse)
    def sat_endpoint(req: FormulaRequest):
        f = _parse_formula(req.formula)
        try:
            verdict = sat(f, req.algorithm, want_trace=req.trace)
        except (StarInputError, ValueError) as e:
            raise HTTPException(status_code=400, detail=str(e))
        return VerdictResponse(
            verdict="SAT" if verdict.answer else "UNSAT",
            answer=verdict.answer,
            trace=verdict.trace.serialize() if req.trace else None)

    @app.post("/valid", response_model=VerdictResponse)
    def valid_endpoint(req: FormulaRequest):
        f = _parse_formula(req.formula)
        try:
            verdict = valid(f, req.algorithm, want_trace=req.trace)
        except (StarInputError, ValueError) as e:
            raise HTTPException(status_code=400, detail=str(e))
        return VerdictResponse(
            verdict="VALID" if verdict.answer else "INVALID",
            answer=verdict.answer,
            trace=verdict.trace.serialize() if req.trace else None)

    @app.post("/oracle/mc", response_model=VerdictResponse)
    def oracle_mc(req: OracleMcRequest):
        v = _parse_model(req.model)
        f = _parse_formula(req.formula)
        answer = evaluate(v, f)
        return VerdictResponse(verdict="TRUE" if answer else "FALSE",
                               answer=answer)

    @app.post("/oracle/sat", response_model=VerdictResponse)
    def oracle_sat_endpoint(req: OracleSatRequest):
        f = _parse_formula(req.formula)
        try:
            answer = oracle_sat(f, cap=req.cap)
        except EnumerationCapError as e:
            raise HTTPException(status_code=413, detail=str(e))
        return VerdictResponse(verdict="SAT" if answer else "UNSAT",
                               answer=answer)

    @app.post("/translate/pdl", response_model=TranslateResponse)
    def translate_pdl(req: TranslateRequest):
        f = _parse_formula(req.formula)
        try:
            return TranslateResponse(lines=emit_pdl_embedding(f).splitlines())
        except NonSingletonAssignmentError as e:
            raise HTTPException(status_code=400, detail=str(e))

    @app.post("/fuzz", response_model=FuzzResponse)
    def fuzz(req: FuzzRequest):
        agree, report = fuzz_run(req.seed, req.cases, max_atoms=req.max_atoms,
                                 max_len=req.max_len, starred=req.starred)
        return FuzzResponse(agree=agree, report=report)

    return app
