"""Text and metadata serialization plus the feasible/infeasible layout.

The text format is line-oriented: a header, one row per node (depot `d`,
customers `c`, stations `f`), a blank line, then one parameter line each
for Q, B, r, g, and H. Floats are written in fixed notation with 12
significant digits and always carry a decimal point; instances are
canonicalized to that precision when generated, so parsing a written
instance reproduces it bit-exactly.
"""

from __future__ import annotations

import copy
import json
import logging
import math
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Optional

import jsonschema

from . import __version__
from .model import (
    CUSTOMER,
    Customer,
    DEPOT,
    Instance,
    Node,
    Point,
    STATION,
    TOL,
    TemporalConfig,
    VehicleConfig,
    validate_instance,
)
from .pipeline import GenerationOutcome, outcome_name

logger = logging.getLogger(__name__)

HEADER_COLUMNS = ("StringID", "Type", "x", "y", "demand", "ReadyTime", "DueDate", "ServiceTime")

PARAMETER_LINES = (
    ("Q", "Vehicle load capacity"),
    ("B", "Battery capacity"),
    ("r", "energy consumption rate"),
    ("g", "recharging rate"),
    ("H", "planning horizon"),
)

FEASIBLE_DIR = "feasible"
INFEASIBLE_DIR = "infeasible"


def format_float(value: float) -> str:
    """Fixed-notation rendering at 12 significant digits.

    Exponent forms are expanded and a decimal point is always present, so
    zero renders as "0.0" and two as "2.0".
    """
    if not math.isfinite(value):
        raise ValueError(f"cannot serialize non-finite value {value}")
    text = f"{value:.12g}"
    if "e" in text or "E" in text:
        text = format(Decimal(text), "f")
    if "." not in text:
        text += ".0"
    return text


def write_instance_text(instance: Instance) -> str:
    """Render an instance in the canonical text layout."""
    h = instance.temporal.horizon
    lines = [" ".join(HEADER_COLUMNS)]
    zero = format_float(0.0)
    horizon = format_float(h)

    def row(string_id: str, kind: str, point: Point, demand: str, ready: str, due: str, service: str) -> str:
        return " ".join((string_id, kind, format_float(point.x), format_float(point.y),
                         demand, ready, due, service))

    lines.append(row("D0", "d", instance.depot.position, zero, zero, horizon, zero))
    for c in instance.customers:
        lines.append(row(f"C{c.id}", "c", c.position, format_float(c.demand),
                         format_float(c.ready), format_float(c.due), format_float(c.service)))
    for s in instance.stations:
        lines.append(row(f"S{s.id}", "f", s.position, zero, zero, horizon, zero))
    lines.append("")
    v = instance.vehicle
    values = {"Q": v.capacity, "B": v.battery, "r": v.consumption_rate, "g": v.charge_rate, "H": h}
    for key, description in PARAMETER_LINES:
        lines.append(f"{key} {description} /{format_float(values[key])}/")
    return "\n".join(lines) + "\n"


class ParseError(ValueError):
    """Malformed instance text; carries the offending 1-based line number."""

    def __init__(self, line_number: int, message: str) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def _parse_float(line_number: int, token: str, label: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(line_number, f"{label} is not a number: {token!r}") from None


def parse_instance_text(text: str) -> Instance:
    """Parse the canonical text layout back into an Instance.

    Id ordering (depot 0, customers 1..N, stations N+1..) and coordinate
    ranges are enforced; the window-width fraction is reconstructed from
    the first customer's window since the format does not carry it.
    """
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "empty input")
    if tuple(lines[0].split()) != HEADER_COLUMNS:
        raise ParseError(1, f"header must be {' '.join(HEADER_COLUMNS)!r}")

    rows: list[tuple[int, list[str]]] = []
    index = 1
    while index < len(lines) and lines[index].strip():
        tokens = lines[index].split()
        if len(tokens) != 8:
            raise ParseError(index + 1, f"expected 8 columns, found {len(tokens)}")
        rows.append((index + 1, tokens))
        index += 1
    if index >= len(lines):
        raise ParseError(len(lines), "missing blank line before parameter block")
    index += 1

    params: dict[str, float] = {}
    for key, _ in PARAMETER_LINES:
        if index >= len(lines):
            raise ParseError(len(lines), f"missing parameter line for {key}")
        line = lines[index]
        tokens = line.split()
        if not tokens or tokens[0] != key:
            raise ParseError(index + 1, f"expected parameter line for {key}, found {line!r}")
        if not (line.rstrip().endswith("/") and "/" in line.rstrip()[:-1]):
            raise ParseError(index + 1, f"parameter value must be enclosed in slashes: {line!r}")
        value_text = line.rstrip()[:-1].rsplit("/", 1)[1]
        params[key] = _parse_float(index + 1, value_text, key)
        index += 1
    while index < len(lines):
        if lines[index].strip():
            raise ParseError(index + 1, f"unexpected trailing content: {lines[index]!r}")
        index += 1

    if not rows:
        raise ParseError(2, "no node rows found")

    depot: Optional[Node] = None
    customers: list[Customer] = []
    stations: list[Node] = []
    for line_number, tokens in rows:
        string_id, kind_letter = tokens[0], tokens[1]
        x = _parse_float(line_number, tokens[2], "x")
        y = _parse_float(line_number, tokens[3], "y")
        if not (-TOL <= x <= 1.0 + TOL and -TOL <= y <= 1.0 + TOL):
            raise ParseError(line_number, f"coordinate ({x}, {y}) outside the unit square")
        demand = _parse_float(line_number, tokens[4], "demand")
        ready = _parse_float(line_number, tokens[5], "ReadyTime")
        due = _parse_float(line_number, tokens[6], "DueDate")
        service = _parse_float(line_number, tokens[7], "ServiceTime")
        if kind_letter == "d":
            if depot is not None:
                raise ParseError(line_number, "second depot row")
            if string_id != "D0":
                raise ParseError(line_number, f"depot row must be D0, found {string_id!r}")
            depot = Node(0, DEPOT, Point(x, y))
        elif kind_letter == "c":
            expected = f"C{len(customers) + 1}"
            if string_id != expected:
                raise ParseError(line_number, f"expected customer {expected!r}, found {string_id!r}")
            node = Node(len(customers) + 1, CUSTOMER, Point(x, y))
            customers.append(Customer(node=node, demand=demand, service=service, ready=ready, due=due))
        elif kind_letter == "f":
            if depot is None:
                raise ParseError(line_number, "station row before depot row")
            expected_id = len(customers) + len(stations) + 1
            if string_id != f"S{expected_id}":
                raise ParseError(line_number, f"expected station S{expected_id}, found {string_id!r}")
            stations.append(Node(expected_id, STATION, Point(x, y)))
        else:
            raise ParseError(line_number, f"unknown node type {kind_letter!r}")
    if depot is None:
        raise ParseError(rows[0][0], "no depot row found")

    horizon = params["H"]
    if customers:
        width_fraction = (customers[0].due - customers[0].ready) / horizon
        width_fraction = min(max(width_fraction, 1e-12), 1.0)
    else:
        width_fraction = 1.0
    instance = Instance(
        depot=depot,
        customers=tuple(customers),
        stations=tuple(stations),
        vehicle=VehicleConfig(
            capacity=params["Q"],
            battery=params["B"],
            consumption_rate=params["r"],
            charge_rate=params["g"],
        ),
        temporal=TemporalConfig(horizon=horizon, width_fraction=width_fraction),
    )
    validate_instance(instance)
    return instance


METADATA_SCHEMA = {
    "type": "object",
    "required": [
        "schema_version", "generator_version", "name", "seed", "status",
        "outcome", "config", "screening", "verification", "diagnostics", "timing",
    ],
    "properties": {
        "schema_version": {"const": 1},
        "generator_version": {"type": "string"},
        "name": {"type": "string"},
        "seed": {"type": "integer"},
        "status": {"enum": ["feasible", "infeasible", "unverified"]},
        "outcome": {
            "enum": ["accepted", "rejected_stage1", "rejected_stage2", "unknown_stage2"],
        },
        "config": {"type": "object"},
        "screening": {
            "type": "object",
            "required": ["passed", "violations"],
            "properties": {
                "passed": {"type": "boolean"},
                "violations": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["condition", "customer_id", "measured", "threshold"],
                        "properties": {
                            "condition": {"type": "string"},
                            "customer_id": {"type": "integer"},
                            "measured": {"type": ["number", "null"]},
                            "threshold": {"type": "number"},
                        },
                    },
                },
            },
        },
        "verification": {
            "type": "object",
            "properties": {
                "skipped": {"type": "string"},
                "status": {"enum": ["feasible", "infeasible", "unknown"]},
                "witness": {"type": "array"},
                "nodes_explored": {"type": "integer"},
                "elapsed": {"type": "number"},
            },
        },
        "diagnostics": {"type": "object"},
        "timing": {"type": "object"},
        "instance_summary": {"type": "object"},
    },
}


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def build_metadata(outcome: GenerationOutcome, name: Optional[str] = None) -> dict:
    """Single JSON document describing one generation attempt."""
    if outcome.verification is not None:
        verification = outcome.verification.to_dict()
    else:
        verification = {"skipped": outcome.verification_skip_reason or "not_run"}
    record = {
        "schema_version": 1,
        "generator_version": __version__,
        "name": name or outcome_name(outcome),
        "seed": outcome.seed,
        "status": outcome.feasibility_status,
        "outcome": outcome.status,
        "config": outcome.config.to_dict(),
        "screening": outcome.screening.to_dict(),
        "verification": verification,
        "diagnostics": dict(outcome.diagnostics),
        "timing": {"generation_seconds": outcome.elapsed},
        "instance_summary": {
            "n_customers": outcome.instance.n_customers,
            "n_stations": outcome.instance.n_stations,
            "battery": outcome.instance.vehicle.battery,
            "max_range": outcome.instance.vehicle.max_range,
        },
    }
    return _json_safe(record)


def validate_metadata(record: dict) -> None:
    jsonschema.validate(record, METADATA_SCHEMA)


def metadata_json(record: dict) -> str:
    return json.dumps(record, sort_keys=True, indent=2) + "\n"


def stable_metadata_json(record: dict) -> str:
    """Deterministic byte view: wall-clock measurements are stripped.

    Everything else, screening reports, witnesses, node counts, and the
    config snapshot, is reproducible from (config, seed) and stays in.
    """
    trimmed = copy.deepcopy(record)
    trimmed.pop("timing", None)
    if isinstance(trimmed.get("verification"), dict):
        trimmed["verification"].pop("elapsed", None)
    return json.dumps(trimmed, sort_keys=True)


@dataclass(frozen=True)
class PersistedPaths:
    text_path: Path
    metadata_path: Path
    name: str


def _resolve_collision(directory: Path, name: str) -> str:
    if not (directory / f"{name}.txt").exists():
        return name
    suffix = 1
    while (directory / f"{name}_{suffix}.txt").exists():
        suffix += 1
    resolved = f"{name}_{suffix}"
    logger.warning("instance name collision: %s already exists, writing %s", name, resolved)
    return resolved


def persist_outcome(
    outcome: GenerationOutcome,
    root_dir: Path | str,
    persist_rejects: bool = True,
) -> Optional[PersistedPaths]:
    """Write <name>.txt and <name>.meta.json under feasible/ or infeasible/.

    Accepted outcomes land in feasible/; everything else (including
    unverified budget-exhausted ones) lands in infeasible/. Returns None
    when a reject is suppressed by the flag.
    """
    if not outcome.accepted and not persist_rejects:
        return None
    root = Path(root_dir)
    directory = root / (FEASIBLE_DIR if outcome.feasibility_status == "feasible" else INFEASIBLE_DIR)
    directory.mkdir(parents=True, exist_ok=True)
    name = _resolve_collision(directory, outcome_name(outcome))
    text_path = directory / f"{name}.txt"
    metadata_path = directory / f"{name}.meta.json"
    text_path.write_text(write_instance_text(outcome.instance))
    metadata = build_metadata(outcome, name=name)
    validate_metadata(metadata)
    metadata_path.write_text(metadata_json(metadata))
    return PersistedPaths(text_path=text_path, metadata_path=metadata_path, name=name)


def load_instance(path: Path | str) -> Instance:
    return parse_instance_text(Path(path).read_text())


def load_metadata(path: Path | str) -> dict:
    record = json.loads(Path(path).read_text())
    validate_metadata(record)
    return record
