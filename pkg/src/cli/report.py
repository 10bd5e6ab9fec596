"""
cli/report.py
Report rows and their csv / tsv / pretty renderings
"""
import csv
import io
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from colorama import just_fix_windows_console
from termcolor import colored

from core.utils.config import get_operational_config

FORMATS = ("csv", "tsv", "pretty")

# frozen; documented in docs/README.md
SOLVE_COLUMNS = (
    "inst", "n_scen", "lb2", "t_lb2", "lb1", "t_lb1", "ub", "tt",
    "gap_pct", "gr", "out", "status", "reference", "oracle", "oracle_gap_pct",
)
INSTANCE_COLUMNS = ("inst", "n_scen", "n_strip", "n_stack", "origins", "destinations")
DIMS_COLUMNS = ("inst", "model", "rows", "binaries", "continuous", "nonzeros")
BOUND_COLUMNS = ("inst", "option", "cluster", "scenarios", "weight", "value", "status", "seconds")

_STATUS_COLOURS = {
    "ok": "green", "optimal": "green", "feasible": "yellow", "no-incumbent": "red",
    "empty-pool": "red", "timeout": "red", "bound-only": "yellow", "infeasible": "red",
}


def format_value(value: Any) -> str:
    """Empty for None; floats with ten significant digits"""
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def solve_row(report, name: Optional[str] = None) -> Dict[str, Any]:
    """One report row: bounds, incumbent value, gap and timings"""
    return {
        "inst": name or report.instance.name,
        "n_scen": report.instance.n_scenarios,
        "lb2": report.option2_bound,
        "t_lb2": report.option2_seconds,
        "lb1": report.option1_bound,
        "t_lb1": report.option1_seconds,
        "ub": report.upper_bound,
        "tt": report.total_seconds,
        "gap_pct": report.gap,
        "gr": report.goodness_ratio,
        "out": report.out,
        "status": report.status,
        "reference": report.reference_value,
        "oracle": report.oracle_value,
        "oracle_gap_pct": report.oracle_gap,
    }


def colour_enabled() -> bool:
    return get_operational_config().enable_color_output and "NO_COLOR" not in os.environ


def render(rows: Sequence[Dict[str, Any]], columns: Sequence[str], fmt: str = "csv",
           title: Optional[str] = None) -> str:
    if fmt == "csv":
        return _delimited(rows, columns, ",")
    if fmt == "tsv":
        return _delimited(rows, columns, "\t")
    return _pretty(rows, columns, title)


def _delimited(rows: Sequence[Dict[str, Any]], columns: Sequence[str], delimiter: str) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, delimiter=delimiter, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buffer.getvalue()


def _pretty(rows: Sequence[Dict[str, Any]], columns: Sequence[str], title: Optional[str]) -> str:
    # Lazy import to avoid circular import issues
    from ui.banner import create_banner

    cells = [[_short(row.get(c)) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[k]) for r in cells]) for k, c in enumerate(columns)]
    lines = [create_banner(title)] if title else []
    lines.append("  ".join(c.ljust(w) for c, w in zip(columns, widths)))
    lines.append("  ".join("-" * w for w in widths))
    use_colour = colour_enabled()
    if use_colour:
        just_fix_windows_console()
    for row in cells:
        parts = []
        for column, cell, width in zip(columns, row, widths):
            text = cell.ljust(width)
            if use_colour and column == "status" and cell in _STATUS_COLOURS:
                text = colored(text, _STATUS_COLOURS[cell])
            parts.append(text)
        lines.append("  ".join(parts).rstrip())
    return "\n".join(lines) + "\n"


def _short(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.2f}" if abs(value) >= 1 else f"{value:.4f}"
    return format_value(value)


def write_rows(path: Union[str, Path], rows: Sequence[Dict[str, Any]], columns: Sequence[str]) -> Path:
    """Machine-readable csv, whatever the terminal format"""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", newline="") as f:
        f.write(_delimited(rows, columns, ","))
    return target


def read_rows(path: Union[str, Path]) -> List[Dict[str, str]]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
