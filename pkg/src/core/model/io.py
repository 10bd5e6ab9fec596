"""
core/model/io.py
JSON instance files (schema "cddp-ts/1")

Layout:
    {
      "schema": "cddp-ts/1",
      "name": "i1",
      "strip_doors": [{"capacities": [...], "install_costs": [...]}, ...],
      "stack_doors": [...],
      "max_doors": {"strip": 5, "stack": 5},
      "distance": [[...], ...],
      "outsourcing_penalty": 12345.0,
      "scenarios": [
        {"name": "s5", "weight": 0.2,
         "flow": [[...]] | {"shape": [M, N], "entries": [[m, n, h], ...]},
         "disruptions": {"strip": [...], "stack": [...]}}
      ]
    }
"""
import dataclasses
import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import scipy.sparse as sp

from ..utils.exceptions import InstanceError, SchemaError
from .instance import DoorSpec, Instance, Scenario
from .solution import FirstStageDesign

SCHEMA_VERSION = "cddp-ts/1"

_TOP_KEYS = {"schema", "name", "strip_doors", "stack_doors", "max_doors", "distance",
             "outsourcing_penalty", "scenarios"}
_REQUIRED_TOP = _TOP_KEYS - {"name"}
_SCENARIO_KEYS = {"name", "weight", "flow", "disruptions"}
_DOOR_KEYS = {"capacities", "install_costs"}


def _numbers(value: Any) -> List[float]:
    return [float(v) for v in value]


def _parse_numbers(value: Any, where: str) -> List[float]:
    if not isinstance(value, list):
        raise SchemaError(where, "expected a list of numbers")
    try:
        return _numbers(value)
    except (TypeError, ValueError) as e:
        raise SchemaError(where, str(e))


def _parse_list(value: Any, where: str) -> List[Any]:
    if not isinstance(value, list):
        raise SchemaError(where, "expected a list")
    return value


def _parse_int(value: Any, where: str) -> int:
    if isinstance(value, bool):
        raise SchemaError(where, "expected an integer")
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise SchemaError(where, "expected an integer")
    if not number.is_integer():
        raise SchemaError(where, "expected an integer")
    return int(number)


def _door_to_dict(door: DoorSpec) -> Dict[str, Any]:
    return {"capacities": _numbers(door.capacities), "install_costs": _numbers(door.install_costs)}


def _flow_to_dict(flow: sp.csr_matrix) -> Dict[str, Any]:
    coo = flow.tocoo()
    order = np.lexsort((coo.col, coo.row))
    entries = [[int(coo.row[t]), int(coo.col[t]), float(coo.data[t])] for t in order]
    return {"shape": [int(flow.shape[0]), int(flow.shape[1])], "entries": entries}


def instance_to_dict(instance: Instance) -> Dict[str, Any]:
    return {
        "schema": SCHEMA_VERSION,
        "name": instance.name,
        "strip_doors": [_door_to_dict(d) for d in instance.strip_doors],
        "stack_doors": [_door_to_dict(d) for d in instance.stack_doors],
        "max_doors": {"strip": instance.max_strip_doors, "stack": instance.max_stack_doors},
        "distance": [_numbers(row) for row in instance.distance],
        "outsourcing_penalty": float(instance.outsourcing_penalty),
        "scenarios": [
            {
                "name": s.name,
                "weight": s.weight,
                "flow": _flow_to_dict(s.flow),
                "disruptions": {"strip": _numbers(s.strip_disruption),
                                "stack": _numbers(s.stack_disruption)},
            }
            for s in instance.scenarios
        ],
    }


def _require(data: Dict[str, Any], keys, allowed, where: str) -> None:
    if not isinstance(data, dict):
        raise SchemaError(where or "<root>", "expected an object")
    for key in sorted(set(data) - set(allowed)):
        raise SchemaError(f"{where}.{key}" if where else key, "unknown key")
    for key in sorted(keys):
        if key not in data:
            raise SchemaError(f"{where}.{key}" if where else key, "missing key")


def _parse_door(data: Any, where: str) -> DoorSpec:
    _require(data, _DOOR_KEYS, _DOOR_KEYS, where)
    return DoorSpec(_parse_numbers(data["capacities"], f"{where}.capacities"),
                    _parse_numbers(data["install_costs"], f"{where}.install_costs"))


def _parse_flow(data: Any, where: str) -> sp.csr_matrix:
    if isinstance(data, list):
        try:
            dense = np.array(data, dtype=np.float64)
        except (TypeError, ValueError) as e:
            raise SchemaError(where, f"dense flow is not numeric: {e}")
        if dense.ndim != 2:
            raise SchemaError(where, "dense flow must be a list of rows")
        return sp.csr_matrix(dense)
    _require(data, {"shape", "entries"}, {"shape", "entries"}, where)
    try:
        rows, cols = (int(v) for v in data["shape"])
        triples = [(int(m), int(n), float(h)) for m, n, h in data["entries"]]
    except (TypeError, ValueError) as e:
        raise SchemaError(f"{where}.entries", str(e))
    for m, n, _ in triples:
        if not (0 <= m < rows and 0 <= n < cols):
            raise SchemaError(f"{where}.entries", f"entry ({m}, {n}) outside shape {rows}x{cols}")
    if not triples:
        return sp.csr_matrix((rows, cols))
    m_idx, n_idx, values = zip(*triples)
    return sp.csr_matrix((values, (m_idx, n_idx)), shape=(rows, cols))


def _parse_scenario(data: Any, where: str) -> Scenario:
    _require(data, _SCENARIO_KEYS - {"name"}, _SCENARIO_KEYS, where)
    disruptions = data["disruptions"]
    _require(disruptions, {"strip", "stack"}, {"strip", "stack"}, f"{where}.disruptions")
    try:
        weight = float(data["weight"])
    except (TypeError, ValueError):
        raise SchemaError(f"{where}.weight", "expected a number")
    return Scenario(
        weight=weight,
        flow=_parse_flow(data["flow"], f"{where}.flow"),
        strip_disruption=_parse_numbers(disruptions["strip"], f"{where}.disruptions.strip"),
        stack_disruption=_parse_numbers(disruptions["stack"], f"{where}.disruptions.stack"),
        name=str(data.get("name", "")),
    )


def instance_from_dict(data: Dict[str, Any]) -> Instance:
    """Parse a schema dict; SchemaError names the first offending key"""
    _require(data, _REQUIRED_TOP, _TOP_KEYS, "")
    if data["schema"] != SCHEMA_VERSION:
        raise SchemaError("schema", f"unsupported version {data['schema']!r}")
    _require(data["max_doors"], {"strip", "stack"}, {"strip", "stack"}, "max_doors")
    max_strip = _parse_int(data["max_doors"]["strip"], "max_doors.strip")
    max_stack = _parse_int(data["max_doors"]["stack"], "max_doors.stack")
    strip = [_parse_door(d, f"strip_doors[{i}]")
             for i, d in enumerate(_parse_list(data["strip_doors"], "strip_doors"))]
    stack = [_parse_door(d, f"stack_doors[{j}]")
             for j, d in enumerate(_parse_list(data["stack_doors"], "stack_doors"))]
    scenarios = [_parse_scenario(s, f"scenarios[{w}]")
                 for w, s in enumerate(_parse_list(data["scenarios"], "scenarios"))]
    try:
        distance = np.array(data["distance"], dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise SchemaError("distance", str(e))
    penalty = data["outsourcing_penalty"]
    if isinstance(penalty, bool) or not isinstance(penalty, (int, float)):
        raise SchemaError("outsourcing_penalty", "expected a number")
    if distance.size != len(strip) * len(stack):
        raise SchemaError("distance", f"expected {len(strip)}x{len(stack)} entries")
    return Instance(
        strip_doors=tuple(strip),
        stack_doors=tuple(stack),
        max_strip_doors=max_strip,
        max_stack_doors=max_stack,
        distance=distance.reshape(len(strip), len(stack)),
        outsourcing_penalty=float(penalty),
        scenarios=tuple(scenarios),
        name=str(data.get("name", "")),
    )


def canonical_json(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), sort_keys=True, separators=(",", ":"))


def instance_hash(instance: Instance) -> str:
    """SHA-256 of the canonical serialization"""
    return hashlib.sha256(canonical_json(instance).encode("utf-8")).hexdigest()


def save_instance(instance: Instance, path: Union[str, Path]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w") as f:
        json.dump(instance_to_dict(instance), f, indent=1)
        f.write("\n")
    return target


def load_instance(path: Union[str, Path]) -> Instance:
    source = Path(path)
    try:
        with open(source, "r") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise InstanceError(f"Instance file not found: {source}", details={"path": str(source)})
    except json.JSONDecodeError as e:
        raise SchemaError("<root>", f"invalid JSON: {e}", path=str(source))
    try:
        instance = instance_from_dict(data)
    except SchemaError as e:
        e.details["file"] = str(source)
        raise
    if not instance.name:
        instance = dataclasses.replace(instance, name=source.stem)
    return instance



# ----- first-stage designs: {"strip": [[door, level], ...], "stack": [...]} -----

def design_to_dict(design: FirstStageDesign) -> Dict[str, Any]:
    strip, stack = design.key()
    return {"strip": [list(p) for p in strip], "stack": [list(p) for p in stack]}


def design_from_dict(data: Any) -> FirstStageDesign:
    _require(data, {"strip", "stack"}, {"strip", "stack"}, "")
    try:
        return FirstStageDesign([(int(d), int(k)) for d, k in data["strip"]],
                                [(int(d), int(k)) for d, k in data["stack"]])
    except (TypeError, ValueError) as e:
        raise SchemaError("strip/stack", f"expected [door, level] pairs: {e}")


def save_design(design: FirstStageDesign, path: Union[str, Path]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w") as f:
        json.dump(design_to_dict(design), f, indent=1)
        f.write("\n")
    return target


def load_design(path: Union[str, Path]) -> FirstStageDesign:
    source = Path(path)
    try:
        with open(source, "r") as f:
            return design_from_dict(json.load(f))
    except FileNotFoundError:
        raise InstanceError(f"Design file not found: {source}", details={"path": str(source)})
    except json.JSONDecodeError as e:
        raise SchemaError("<root>", f"invalid JSON: {e}", path=str(source))
