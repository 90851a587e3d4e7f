"""HTTP service: live previews, batch jobs, instance retrieval, solving.

Long-running work (batch generation, bench sweeps) runs on a bounded
thread pool and is polled by job id; previews and solves answer inline.
The studio UI bundle, when present, is served from the same process.
"""

from __future__ import annotations

import os
import re
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import __version__
from .bench import default_station_count, run_bench
from .cli import build_standard_config
from .instance_io import (
    FEASIBLE_DIR,
    INFEASIBLE_DIR,
    build_metadata,
    load_instance,
    load_metadata,
    persist_outcome,
    write_instance_text,
)
from .model import Instance
from .pipeline import GeneratorConfig, generate_batch, generate_one, outcome_name
from .solver import SolverFailure, SolverParams, evaluate_solution, solve

_NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")

JOB_RUNNING = "running"
JOB_FINISHED = "finished"
JOB_FAILED = "failed"


class ConfigRequest(BaseModel):
    """Interface-level generation knobs; mirrors the CLI flags."""

    customers: int = Field(ge=1, le=1000)
    stations: Optional[int] = Field(default=None, ge=0, le=200)
    family: Literal["R", "C", "RC"] = "R"
    regime: Literal["wide", "medium", "tight"] = "medium"
    phi: Optional[float] = Field(default=None, gt=0.0, le=1.0,
                                 description="time-window width fraction; overrides the regime")
    seed: int = 0
    sigma: float = Field(default=0.05, gt=0.0)
    rho: float = Field(default=0.5, ge=0.0, le=1.0)
    capacity: float = Field(default=1.5, gt=0.0)
    rate: float = Field(default=0.25, gt=0.0)
    charge_rate: float = Field(default=1.0, gt=0.0)
    horizon: float = Field(default=2.0, gt=0.0)
    randomized_window_starts: bool = False

    def to_generator_config(self) -> GeneratorConfig:
        return build_standard_config(
            customers=self.customers,
            stations=self.stations,
            family=self.family,
            regime=self.regime,
            sigma=self.sigma,
            rho=self.rho,
            capacity=self.capacity,
            rate=self.rate,
            charge_rate=self.charge_rate,
            horizon=self.horizon,
            width_fraction=self.phi,
            randomized_window_starts=self.randomized_window_starts,
        )


class GenerateRequest(ConfigRequest):
    count: int = Field(ge=1, le=10_000)
    persist_rejects: bool = True


class SolveRequest(BaseModel):
    iterations: int = Field(default=200, ge=0, le=100_000)
    time_budget: float = Field(default=5.0, gt=0.0, le=300.0)
    seed: int = 0


class BenchRequest(BaseModel):
    sizes: list[int] = Field(default=[5, 10, 20, 30, 40, 50], min_length=1, max_length=11)
    families: list[Literal["R", "C", "RC"]] = ["R", "C", "RC"]
    regimes: list[Literal["wide", "medium", "tight"]] = ["wide", "medium", "tight"]
    per_cell: int = Field(default=25, ge=1, le=200)
    seed: int = 0


class JobRegistry:
    """Bounded worker pool with immutable-once-finished job records."""

    def __init__(self, workers: int = 2) -> None:
        self._executor = ThreadPoolExecutor(max_workers=workers)
        self._jobs: dict[str, dict] = {}
        self._lock = threading.Lock()

    def submit(self, kind: str, fn) -> str:
        job_id = uuid.uuid4().hex[:16]
        with self._lock:
            self._jobs[job_id] = {
                "id": job_id,
                "kind": kind,
                "state": JOB_RUNNING,
                "submitted_at": time.time(),
                "result": None,
                "error": None,
            }

        def run() -> None:
            try:
                result = fn()
            except Exception as exc:  # job isolation: report, never crash the pool
                with self._lock:
                    job = self._jobs[job_id]
                    job["state"] = JOB_FAILED
                    job["error"] = f"{type(exc).__name__}: {exc}"
            else:
                with self._lock:
                    job = self._jobs[job_id]
                    job["state"] = JOB_FINISHED
                    job["result"] = result

        self._executor.submit(run)
        return job_id

    def get(self, job_id: str) -> Optional[dict]:
        with self._lock:
            job = self._jobs.get(job_id)
            return dict(job) if job is not None else None


def _nodes_payload(instance: Instance) -> list[dict]:
    nodes = [{
        "id": instance.depot.id,
        "kind": instance.depot.kind,
        "x": instance.depot.position.x,
        "y": instance.depot.position.y,
    }]
    for customer in instance.customers:
        nodes.append({
            "id": customer.id,
            "kind": customer.node.kind,
            "x": customer.position.x,
            "y": customer.position.y,
            "demand": customer.demand,
            "ready": customer.ready,
            "due": customer.due,
            "service": customer.service,
        })
    for station in instance.stations:
        nodes.append({
            "id": station.id,
            "kind": station.kind,
            "x": station.position.x,
            "y": station.position.y,
        })
    return nodes


def default_data_root() -> Path:
    return Path(os.environ.get("EVRPTWGEN_DATA_ROOT", "data"))


def default_static_dir() -> Optional[Path]:
    override = os.environ.get("EVRPTWGEN_STATIC_DIR")
    if override:
        return Path(override)
    bundled = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
    return bundled if bundled.is_dir() else None


def create_app(data_root: Optional[Path] = None,
               static_dir: Optional[Path] = None,
               workers: int = 2) -> FastAPI:
    root = Path(data_root) if data_root is not None else default_data_root()
    static = Path(static_dir) if static_dir is not None else default_static_dir()
    app = FastAPI(title="evrptwgen", version=__version__)
    jobs = JobRegistry(workers=workers)

    def build_config(request: ConfigRequest) -> GeneratorConfig:
        try:
            return request.to_generator_config()
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/api/preview")
    def preview(request: ConfigRequest) -> dict:
        config = build_config(request)
        outcome = generate_one(config, request.seed)
        instance = outcome.instance
        return {
            "name": outcome_name(outcome),
            "status": outcome.status,
            "feasibility": outcome.feasibility_status,
            "seed": request.seed,
            "metadata": build_metadata(outcome),
            "instance_text": write_instance_text(instance),
            "nodes": _nodes_payload(instance),
            "vehicle": {
                "capacity": instance.vehicle.capacity,
                "battery": instance.vehicle.battery,
                "consumption_rate": instance.vehicle.consumption_rate,
                "charge_rate": instance.vehicle.charge_rate,
                "max_range": instance.vehicle.max_range,
            },
            "horizon": instance.temporal.horizon,
            "station_default": default_station_count(request.customers),
        }

    @app.post("/api/generate")
    def generate(request: GenerateRequest) -> dict:
        config = build_config(request)

        def job() -> dict:
            files: list[dict] = []

            def persist(outcome) -> None:
                paths = persist_outcome(outcome, root, persist_rejects=request.persist_rejects)
                if paths is not None:
                    files.append({
                        "name": paths.name,
                        "status": outcome.feasibility_status,
                        "text_path": str(paths.text_path),
                    })

            _, stats = generate_batch(config, request.count, request.seed, on_outcome=persist)
            return {"stats": stats.to_dict(), "files": files}

        job_id = jobs.submit("generate", job)
        return {"batch_id": job_id}

    @app.post("/api/bench")
    def bench(request: BenchRequest) -> dict:
        letter_to_name = {"R": "random", "C": "clustered", "RC": "mixed"}
        families = tuple(letter_to_name[f] for f in request.families)
        regimes = tuple(request.regimes)
        sizes = tuple((n, default_station_count(n)) for n in request.sizes)

        def job() -> dict:
            report = run_bench(families=families, regimes=regimes, sizes=sizes,
                               per_cell=request.per_cell, base_seed=request.seed)
            payload = report.to_dict()
            payload["gamma_curve"] = {str(n): g for n, g in report.gamma_curve().items()}
            payload["matrix"] = {
                f"{family}/{regime}": {"mean": mean, "std": std}
                for (family, regime), (mean, std) in report.matrix().items()
            }
            return payload

        job_id = jobs.submit("bench", job)
        return {"batch_id": job_id}

    @app.get("/api/batch/{batch_id}")
    def batch_status(batch_id: str) -> dict:
        job = jobs.get(batch_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown batch id {batch_id!r}")
        return job

    def locate(name: str) -> Path:
        if not _NAME_RE.match(name):
            raise HTTPException(status_code=404, detail=f"unknown instance {name!r}")
        for subdir in (FEASIBLE_DIR, INFEASIBLE_DIR):
            candidate = root / subdir / f"{name}.txt"
            if candidate.is_file():
                return candidate
        raise HTTPException(status_code=404, detail=f"unknown instance {name!r}")

    @app.get("/api/instance/{name}")
    def instance_detail(name: str) -> dict:
        text_path = locate(name)
        payload: dict = {"name": name, "instance_text": text_path.read_text()}
        metadata_path = text_path.with_name(f"{text_path.stem}.meta.json")
        if metadata_path.is_file():
            payload["metadata"] = load_metadata(metadata_path)
        instance = load_instance(text_path)
        payload["nodes"] = _nodes_payload(instance)
        return payload

    @app.post("/api/solve/{name}")
    def solve_instance(name: str, request: SolveRequest) -> dict:
        text_path = locate(name)
        instance = load_instance(text_path)
        params = SolverParams(iterations=request.iterations,
                              time_budget=request.time_budget,
                              seed=request.seed)
        try:
            solution = solve(instance, params)
        except SolverFailure as exc:
            return {"name": name, "solved": False, "error": str(exc)}
        metrics = evaluate_solution(instance, solution)
        return {
            "name": name,
            "solved": True,
            "total_distance": metrics.total_distance,
            "ev_count": metrics.ev_count,
            "routes": [list(route) for route in solution.routes],
            "route_slacks": list(metrics.route_slacks),
        }

    if static is not None and static.is_dir():
        app.mount("/", StaticFiles(directory=static, html=True), name="studio")
    else:
        @app.get("/")
        def index() -> dict:
            return {"service": "evrptwgen", "version": __version__, "docs": "/docs"}

    return app
