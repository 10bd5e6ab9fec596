"""
modules/lip/milp.py
Solver-agnostic sparse mixed-binary linear model
"""
import math
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

BINARY = "B"
CONTINUOUS = "C"

LE = "L"
EQ = "E"
GE = "G"

SENSE_SYMBOLS = {LE: "<=", EQ: "=", GE: ">="}

Symbol = Tuple[Hashable, ...]


@dataclass(frozen=True)
class ModelDims:
    """Row, column and nonzero counts of a model"""

    n_rows: int = 0
    n_binary: int = 0
    n_continuous: int = 0
    n_nonzeros: int = 0

    def as_row(self) -> Tuple[int, int, int, int]:
        return self.n_rows, self.n_binary, self.n_continuous, self.n_nonzeros


@dataclass
class GenericMILP:
    """
    min c.x  s.t.  A x (sense) b,  lb <= x <= ub,  x_j binary for kinds[j] == 'B'

    `symbols` maps model symbols such as ('x', w, m, i) to column indices;
    `names` holds the exported variable names.
    """

    name: str
    names: List[str]
    kinds: np.ndarray
    objective: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    matrix: sp.csr_matrix
    senses: np.ndarray
    rhs: np.ndarray
    row_names: List[str]
    symbols: Dict[Symbol, int] = field(default_factory=dict)

    @property
    def n_vars(self) -> int:
        return len(self.names)

    @property
    def n_rows(self) -> int:
        return len(self.row_names)

    @property
    def binary_mask(self) -> np.ndarray:
        return self.kinds == BINARY

    def evaluate(self, vector: Sequence[float]) -> float:
        x = np.asarray(vector, dtype=np.float64)
        return math.fsum(self.objective * x)

    def row_activity(self, vector: Sequence[float]) -> np.ndarray:
        return self.matrix @ np.asarray(vector, dtype=np.float64)

    def violated_rows(self, vector: Sequence[float], tol: float = 1e-6) -> List[str]:
        activity = self.row_activity(vector)
        bad = ((self.senses == LE) & (activity > self.rhs + tol)) \
            | ((self.senses == GE) & (activity < self.rhs - tol)) \
            | ((self.senses == EQ) & (np.abs(activity - self.rhs) > tol))
        return [self.row_names[r] for r in np.flatnonzero(bad)]

    def is_feasible(self, vector: Sequence[float], tol: float = 1e-6) -> bool:
        x = np.asarray(vector, dtype=np.float64)
        if x.shape != (self.n_vars,):
            return False
        if np.any(x < self.lower - tol) or np.any(x > self.upper + tol):
            return False
        binaries = x[self.binary_mask]
        if np.any(np.abs(binaries - np.round(binaries)) > tol):
            return False
        return not self.violated_rows(x, tol)

    def vector_from_symbols(self, values: Mapping[Symbol, float]) -> np.ndarray:
        """Dense vector; symbols the model does not declare are ignored"""
        x = np.zeros(self.n_vars)
        for symbol, value in values.items():
            col = self.symbols.get(symbol)
            if col is not None:
                x[col] = value
        return x

    def symbols_of(self, vector: Sequence[float], tol: float = 1e-9) -> Dict[Symbol, float]:
        """Nonzero entries of a vector keyed by symbol"""
        x = np.asarray(vector, dtype=np.float64)
        return {s: float(x[c]) for s, c in self.symbols.items() if abs(x[c]) > tol}


def count_dims(milp: GenericMILP) -> ModelDims:
    """#rows, #binaries, #continuous, structural nonzeros of the rows"""
    binaries = int(np.count_nonzero(milp.binary_mask))
    nonzeros = int(np.count_nonzero(milp.matrix.data)) if milp.n_rows else 0
    return ModelDims(milp.n_rows, binaries, milp.n_vars - binaries, nonzeros)


class MILPBuilder:
    """Incremental row/column assembly; rows without terms are dropped"""

    def __init__(self, name: str):
        self.name = name
        self._names: List[str] = []
        self._kinds: List[str] = []
        self._objective: List[float] = []
        self._lower: List[float] = []
        self._upper: List[float] = []
        self._symbols: Dict[Symbol, int] = {}
        self._row_index: List[int] = []
        self._col_index: List[int] = []
        self._values: List[float] = []
        self._senses: List[str] = []
        self._rhs: List[float] = []
        self._row_names: List[str] = []

    def add_var(self, name: str, kind: str, objective: float = 0.0,
                symbol: Optional[Symbol] = None, lower: float = 0.0, upper: float = 1.0) -> int:
        col = len(self._names)
        self._names.append(name)
        self._kinds.append(kind)
        self._objective.append(float(objective))
        self._lower.append(lower)
        self._upper.append(upper)
        if symbol is not None:
            self._symbols[symbol] = col
        return col

    def add_row(self, name: str, terms: Sequence[Tuple[int, float]], sense: str, rhs: float = 0.0) -> bool:
        terms = [(c, v) for c, v in terms if v != 0]
        if not terms:
            return False
        row = len(self._row_names)
        for col, value in terms:
            self._row_index.append(row)
            self._col_index.append(col)
            self._values.append(float(value))
        self._senses.append(sense)
        self._rhs.append(float(rhs))
        self._row_names.append(name)
        return True

    def build(self) -> GenericMILP:
        shape = (len(self._row_names), len(self._names))
        matrix = sp.csr_matrix(
            (self._values, (self._row_index, self._col_index)), shape=shape, dtype=np.float64)
        matrix.sum_duplicates()
        return GenericMILP(
            name=self.name,
            names=list(self._names),
            kinds=np.array(self._kinds, dtype="<U1"),
            objective=np.array(self._objective, dtype=np.float64),
            lower=np.array(self._lower, dtype=np.float64),
            upper=np.array(self._upper, dtype=np.float64),
            matrix=matrix,
            senses=np.array(self._senses, dtype="<U1"),
            rhs=np.array(self._rhs, dtype=np.float64),
            row_names=list(self._row_names),
            symbols=dict(self._symbols),
        )
