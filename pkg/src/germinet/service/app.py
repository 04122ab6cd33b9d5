"""FastAPI application wrapping the core package."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import DataError, GerminetError
from . import handlers
from . import schemas as sc

app = FastAPI(
    title="germinet",
    description=(
        "Local community detection service: seed-set germination by greedy "
        "effective-resistance growth, personalized PageRank propagation, "
        "benchmark generation and evaluation."
    ),
)


def _run(handler, request):
    try:
        return handler(request)
    except DataError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except GerminetError as exc:
        raise HTTPException(status_code=500, detail=str(exc))


@app.get("/healthz", response_model=sc.HealthResponse)
def healthz():
    return handlers.handle_health()


@app.post("/generate", response_model=sc.GenerateResponse)
def generate(request: sc.GenerateRequest):
    return _run(handlers.handle_generate, request)


@app.post("/resistance", response_model=sc.ResistanceResponse)
def resistance(request: sc.ResistanceRequest):
    return _run(handlers.handle_resistance, request)


@app.post("/germinate", response_model=sc.GerminationModel)
def germinate(request: sc.GerminateRequest):
    return _run(handlers.handle_germinate, request)


@app.post("/ppr", response_model=sc.PprResponse)
def ppr(request: sc.PprRequest):
    return _run(handlers.handle_ppr, request)


@app.post("/detect", response_model=sc.DetectResponse)
def detect(request: sc.DetectRequest):
    return _run(handlers.handle_detect, request)


@app.post("/bench", response_model=sc.BenchResponse)
def bench(request: sc.BenchRequest):
    return _run(handlers.handle_bench, request)


@app.post("/eval", response_model=sc.EvalResponse)
def evaluate(request: sc.EvalRequest):
    return _run(handlers.handle_eval, request)
