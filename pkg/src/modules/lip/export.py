"""
modules/lip/export.py
CPLEX-LP and free-MPS writers, plus a reader for our own LP output
"""
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from core.utils.exceptions import ModelExportError
from core.utils.logging import get_logger
from .builder import parse_symbol
from .milp import BINARY, CONTINUOUS, EQ, GE, LE, SENSE_SYMBOLS, GenericMILP, MILPBuilder

LP_MAX_LINE_LENGTH = 78

_SENSE_FROM_TEXT = {"<=": LE, "=<": LE, "<": LE, ">=": GE, "=>": GE, ">": GE, "=": EQ}


def _number(value: float) -> str:
    return format(float(value), ".17g")


def _expression(label: str, cols: np.ndarray, values: np.ndarray, names: List[str]) -> List[str]:
    lines: List[str] = []
    line = f" {label}:"
    for col, value in zip(cols, values):
        sign = "-" if value < 0 else "+"
        magnitude = abs(value)
        term = f" {sign} {names[col]}" if magnitude == 1 else f" {sign} {_number(magnitude)} {names[col]}"
        if len(line) + len(term) > LP_MAX_LINE_LENGTH:
            lines.append(line)
            line = "  "
        line += term
    lines.append(line)
    return lines


def lp_lines(milp: GenericMILP) -> List[str]:
    lines = [f"\\ Problem: {milp.name}", "Minimize"]
    objective_cols = np.flatnonzero(milp.objective)
    if objective_cols.size:
        lines += _expression("obj", objective_cols, milp.objective[objective_cols], milp.names)
    else:
        lines.append(" obj: 0 " + (milp.names[0] if milp.names else ""))
    lines.append("Subject To")
    matrix = milp.matrix.tocsr()
    for r in range(milp.n_rows):
        start, end = matrix.indptr[r], matrix.indptr[r + 1]
        body = _expression(milp.row_names[r], matrix.indices[start:end], matrix.data[start:end], milp.names)
        body[-1] += f" {SENSE_SYMBOLS[milp.senses[r]]} {_number(milp.rhs[r])}"
        lines += body
    lines.append("Bounds")
    for col in np.flatnonzero(milp.kinds == CONTINUOUS):
        lines.append(f" {_number(milp.lower[col])} <= {milp.names[col]} <= {_number(milp.upper[col])}")
    lines.append("Binaries")
    for col in np.flatnonzero(milp.kinds == BINARY):
        lines.append(f" {milp.names[col]}")
    lines.append("End")
    return lines


def write_lp(milp: GenericMILP, path: Union[str, Path]) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w") as f:
            f.write("\n".join(lp_lines(milp)) + "\n")
    except OSError as e:
        raise ModelExportError(str(target), str(e))
    get_logger().info(f"Wrote LP model {milp.name} to {target}")
    return target


def write_mps(milp: GenericMILP, path: Union[str, Path]) -> Path:
    """Free-format MPS with MARKER blocks around binaries"""
    lines = [f"NAME {milp.name}", "ROWS", " N obj"]
    lines += [f" {milp.senses[r]} {milp.row_names[r]}" for r in range(milp.n_rows)]
    lines.append("COLUMNS")
    columns = milp.matrix.tocsc()
    in_integer_block = False
    marker = 0
    for col in range(milp.n_vars):
        is_binary = milp.kinds[col] == BINARY
        if is_binary != in_integer_block:
            kind = "'INTORG'" if is_binary else "'INTEND'"
            lines.append(f" MARKER{marker} 'MARKER' {kind}")
            marker += 1
            in_integer_block = is_binary
        name = milp.names[col]
        if milp.objective[col]:
            lines.append(f" {name} obj {_number(milp.objective[col])}")
        for k in range(columns.indptr[col], columns.indptr[col + 1]):
            lines.append(f" {name} {milp.row_names[columns.indices[k]]} {_number(columns.data[k])}")
        if not milp.objective[col] and columns.indptr[col] == columns.indptr[col + 1]:
            lines.append(f" {name} obj 0")
    if in_integer_block:
        lines.append(f" MARKER{marker} 'MARKER' 'INTEND'")
    lines.append("RHS")
    lines += [f" RHS {milp.row_names[r]} {_number(milp.rhs[r])}"
              for r in range(milp.n_rows) if milp.rhs[r] != 0]
    lines.append("BOUNDS")
    for col in range(milp.n_vars):
        if milp.kinds[col] == BINARY:
            lines.append(f" BV BND {milp.names[col]}")
        else:
            lines.append(f" UP BND {milp.names[col]} {_number(milp.upper[col])}")
    lines.append("ENDATA")

    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as e:
        raise ModelExportError(str(target), str(e))
    return target


def _parse_terms(tokens: List[str]) -> List[Tuple[str, float]]:
    terms: List[Tuple[str, float]] = []
    sign, coefficient = 1.0, None
    for token in tokens:
        if token in ("+", "-"):
            sign = -1.0 if token == "-" else 1.0
            continue
        try:
            coefficient = float(token)
            continue
        except ValueError:
            pass
        terms.append((token, sign * (1.0 if coefficient is None else coefficient)))
        sign, coefficient = 1.0, None
    return terms


def _statements(lines: List[str]) -> List[str]:
    """Join continuation lines onto the statement that carries a label"""
    statements: List[str] = []
    for line in lines:
        if ":" in line or not statements:
            statements.append(line.strip())
        else:
            statements[-1] += " " + line.strip()
    return statements


def read_lp(path: Union[str, Path]) -> GenericMILP:
    """Parse LP text written by write_lp"""
    source = Path(path)
    try:
        raw = source.read_text().splitlines()
    except OSError as e:
        raise ModelExportError(str(source), str(e))

    sections: Dict[str, List[str]] = {"Minimize": [], "Subject To": [], "Bounds": [], "Binaries": []}
    name, current = source.stem, None
    for line in raw:
        stripped = line.strip()
        if stripped.startswith("\\ Problem:"):
            name = stripped.split(":", 1)[1].strip()
            continue
        if not stripped or stripped.startswith("\\"):
            continue
        if stripped in sections:
            current = stripped
            continue
        if stripped == "End":
            break
        if current is None:
            raise ModelExportError(str(source), f"text outside any section: {stripped!r}")
        sections[current].append(line)

    bounds: Dict[str, Tuple[float, float]] = {}
    for line in sections["Bounds"]:
        low, _, var, _, high = line.split()
        bounds[var] = (float(low), float(high))
    binaries = [line.strip() for line in sections["Binaries"] if line.strip()]

    builder = MILPBuilder(name)
    columns: Dict[str, int] = {}

    def declare(var: str) -> int:
        if var not in columns:
            kind = CONTINUOUS if var in bounds else BINARY
            low, high = bounds.get(var, (0.0, 1.0))
            columns[var] = builder.add_var(var, kind, symbol=parse_symbol(var), lower=low, upper=high)
        return columns[var]

    for var in list(bounds) + binaries:
        declare(var)

    objective: Dict[int, float] = {}
    for statement in _statements(sections["Minimize"]):
        for var, value in _parse_terms(statement.split(":", 1)[1].split()):
            col = declare(var)
            objective[col] = objective.get(col, 0.0) + value

    for statement in _statements(sections["Subject To"]):
        label, body = statement.split(":", 1)
        tokens = body.split()
        position = next((p for p, t in enumerate(tokens) if t in _SENSE_FROM_TEXT), None)
        if position is None:
            raise ModelExportError(str(source), f"row {label.strip()} has no sense")
        terms = _parse_terms(tokens[:position])
        builder.add_row(label.strip(), [(declare(v), c) for v, c in terms],
                        _SENSE_FROM_TEXT[tokens[position]], float(tokens[position + 1]))

    milp = builder.build()
    for col, value in objective.items():
        milp.objective[col] = value
    return milp
