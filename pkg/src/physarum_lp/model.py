"""Problem representation, validation, and the instance constants.

An instance is ``min c^T x`` over ``Ax = b, x >= 0`` in directed mode, or
``min c^T x`` over ``Af = b, |f| <= x`` in undirected mode, with integral
``A``, ``b``, ``c``.  Every bound the convergence analysis uses is derived
from a handful of exact rational constants computed here by exhaustive
sub-determinant enumeration.

The determinant constant ``D`` ranges over square submatrices of
``A / gamma_A`` of dimension n-1 and n (scale-invariant), while ``D_S``
ranges over *all* square submatrices of ``A`` itself; both are exposed
because step-size bounds use ``D`` and the preconditioner uses ``D_S``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Tuple

from . import linalg
from .errors import (
    InfeasibleShapeError,
    KernelCostViolation,
    NegativeCostError,
    SizeCapError,
)

DIRECTED = "directed"
UNDIRECTED = "undirected"

DEFAULT_SIZE_CAP = 2_000_000
SIZE_CAP_ENV = "PHYSARUM_SIZE_CAP"


def size_cap(default: int = DEFAULT_SIZE_CAP) -> int:
    raw = os.environ.get(SIZE_CAP_ENV)
    return int(raw) if raw else default


@dataclass
class LpInstance:
    """An integral LP in equality form, plus the solver mode."""

    A: List[List[int]]
    b: List[int]
    c: List[int]
    mode: str = DIRECTED
    x0: Optional[List[Fraction]] = None
    validated: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def m(self) -> int:
        return len(self.A[0]) if self.A else 0

    def column(self, e: int) -> List[int]:
        return [row[e] for row in self.A]

    def columns(self) -> List[Tuple[int, ...]]:
        cols = self._cache.get("columns")
        if cols is None:
            cols = [tuple(row[e] for row in self.A) for e in range(self.m)]
            self._cache["columns"] = cols
        return cols

    def zero_cost_columns(self) -> List[int]:
        return [e for e in range(self.m) if self.c[e] == 0]

    def submatrix(self, rows, cols) -> List[List[int]]:
        return [[self.A[i][j] for j in cols] for i in rows]


@dataclass(frozen=True)
class InstanceConstants:
    """Exact rational constants controlling step sizes and iteration counts."""

    gamma_A: int
    D: Fraction
    D_S: Fraction
    c_min: int
    c_max: int
    h0: Fraction
    Psi0: Fraction
    C1: Fraction
    C2: Fraction
    C3: Fraction
    rho_A: Fraction


def _require_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, Fraction) and value.denominator == 1:
            return int(value)
        raise ValueError("%s must be integral, got %r" % (what, value))
    return value


def validate(raw: LpInstance) -> LpInstance:
    """Validate and normalize an instance.

    Drops rows that are linearly dependent on earlier rows (the feasible set
    is unchanged), then checks: integral data, m >= n, nonnegative cost,
    linearly independent zero-cost columns (equivalently, every nonzero
    kernel vector has positive cost), and b != 0.
    """
    if not raw.A or not raw.A[0]:
        raise InfeasibleShapeError("empty constraint matrix")
    linalg.check_matrix(raw.A)
    A = [[_require_int(v, "A entry") for v in row] for row in raw.A]
    b = [_require_int(v, "b entry") for v in raw.b]
    c = [_require_int(v, "c entry") for v in raw.c]
    if len(b) != len(A):
        raise InfeasibleShapeError("b length does not match row count")
    if len(c) != len(A[0]):
        raise InfeasibleShapeError("c length does not match column count")
    if raw.mode not in (DIRECTED, UNDIRECTED):
        raise ValueError("mode must be %r or %r" % (DIRECTED, UNDIRECTED))
    if any(v < 0 for v in c):
        raise NegativeCostError("cost vector has a negative entry")

    kept = linalg.independent_rows(A)
    if len(kept) < len(A):
        # a dropped row must be consistent with the kept ones, otherwise the
        # system Ax = b has no solution at all
        kept_set = set(kept)
        full_rank = linalg.rank([A[i] + [b[i]] for i in kept])
        for i in range(len(A)):
            if i in kept_set:
                continue
            probe = [A[j] + [b[j]] for j in kept] + [A[i] + [b[i]]]
            if linalg.rank(probe) != full_rank:
                raise InfeasibleShapeError(
                    "dependent row %d is inconsistent with the others" % i)
        A = [A[i] for i in kept]
        b = [b[i] for i in kept]

    n, m = len(A), len(A[0])
    if m < n:
        raise InfeasibleShapeError("fewer columns (%d) than independent rows (%d)" % (m, n))

    zero_cols = [e for e in range(m) if c[e] == 0]
    if zero_cols:
        block = [[A[i][e] for e in zero_cols] for i in range(n)]
        if linalg.rank(block) != len(zero_cols):
            raise KernelCostViolation(
                "zero-cost columns are linearly dependent; some nonzero kernel "
                "vector has zero cost")

    if all(v == 0 for v in b):
        raise InfeasibleShapeError("b = 0 is not supported")

    x0 = None
    if raw.x0 is not None:
        if len(raw.x0) != m:
            raise InfeasibleShapeError("x0 length does not match column count")
        x0 = [Fraction(v) for v in raw.x0]
        if any(v <= 0 for v in x0):
            raise ValueError("x0 must be strictly positive")

    return LpInstance(A=A, b=b, c=c, mode=raw.mode, x0=x0, validated=True)


def _max_abs_subdet(A_rows: List[List[Fraction]], dims, cap: int) -> Fraction:
    """Max |det| over all square submatrices with dimension in ``dims``."""
    n = len(A_rows)
    m = len(A_rows[0])
    total = sum(math.comb(n, k) * math.comb(m, k) for k in dims)
    if total > cap:
        raise SizeCapError(
            "submatrix enumeration needs %d determinants (cap %d)" % (total, cap))
    best = Fraction(0)
    for k in dims:
        if k == 0:
            best = max(best, Fraction(1))
            continue
        for rows in combinations(range(n), k):
            picked = [A_rows[i] for i in rows]
            for cols in combinations(range(m), k):
                sub = [[row[j] for j in cols] for row in picked]
                best = max(best, abs(Fraction(linalg.determinant(sub))))
    return best


def compute_constants(inst: LpInstance, x0) -> InstanceConstants:
    """Compute every instance constant exactly.

    ``D`` and ``D_S`` are found by exhaustive enumeration of square
    submatrices; above the size cap the enumeration refuses rather than
    approximating (callers must then supply an explicit step size).
    """
    if not inst.validated:
        inst = validate(inst)
    x0 = [Fraction(v) for v in x0]
    if any(v <= 0 for v in x0):
        raise ValueError("x0 must be strictly positive")
    key = ("constants", tuple(x0))
    cached = inst._cache.get(key)
    if cached is not None:
        return cached

    n, m = inst.n, inst.m
    cap = size_cap()
    gamma = 0
    for row in inst.A:
        for v in row:
            if v != 0:
                gamma = math.gcd(gamma, abs(v))
    if gamma == 0:
        raise InfeasibleShapeError("constraint matrix is all zeros")

    scaled = [[Fraction(v, gamma) for v in row] for row in inst.A]
    D = _max_abs_subdet(scaled, [n - 1, n], cap)
    D_S = _max_abs_subdet([[Fraction(v) for v in row] for row in inst.A],
                          range(1, min(n, m) + 1), cap)

    positive_costs = [v for v in inst.c if v > 0]
    if not positive_costs:
        raise NegativeCostError("cost vector is identically zero")
    c_min = min(positive_costs)
    c_max = max(inst.c)
    norm_c1 = sum(inst.c)
    norm_b1 = sum(abs(v) for v in inst.b)
    norm_b_scaled = Fraction(norm_b1, gamma)
    norm_A_inf = max(abs(v) for row in inst.A for v in row)

    h0 = Fraction(c_min) / (4 * D * norm_c1)
    Psi0 = max(m * D * D * norm_b_scaled, max(x0))
    C1 = D * norm_b_scaled * norm_c1
    C2 = Fraction(64 * m * m * n) * D ** 5 * gamma ** 2 * norm_A_inf * norm_b1
    C3 = D ** 3 * gamma * norm_b1 * norm_c1
    rho_A = max(D * gamma, n * D * D * norm_A_inf)

    consts = InstanceConstants(
        gamma_A=gamma, D=D, D_S=D_S, c_min=c_min, c_max=c_max,
        h0=h0, Psi0=Psi0, C1=C1, C2=C2, C3=C3, rho_A=rho_A)
    inst._cache[key] = consts
    return consts


def default_start(inst: LpInstance) -> List[Fraction]:
    """The instance's x0 if present, otherwise the all-ones vector."""
    if inst.x0 is not None:
        return list(inst.x0)
    return [Fraction(1)] * inst.m


def loads(text: str) -> LpInstance:
    """Parse and validate the JSON instance format.

    Fields: ``n``, ``m``, ``A`` (row-major array of arrays of integers),
    ``b``, ``c`` (integer arrays), optional ``x0`` (positive decimals, read
    exactly), optional ``mode`` ("directed" | "undirected").
    """
    data = json.loads(text, parse_float=Fraction)
    for fld in ("A", "b", "c"):
        if fld not in data:
            raise ValueError("instance JSON misses field %r" % fld)
    raw = LpInstance(
        A=data["A"],
        b=data["b"],
        c=data["c"],
        mode=data.get("mode", DIRECTED),
        x0=data.get("x0"),
    )
    inst = validate(raw)
    if "n" in data and data["n"] != inst.n and data["n"] != len(raw.A):
        raise ValueError("declared n does not match A")
    if "m" in data and data["m"] != inst.m:
        raise ValueError("declared m does not match A")
    return inst


def load(path: str) -> LpInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(inst: LpInstance) -> str:
    data = {
        "n": inst.n,
        "m": inst.m,
        "A": inst.A,
        "b": inst.b,
        "c": inst.c,
        "mode": inst.mode,
    }
    if inst.x0 is not None:
        data["x0"] = [float(v) for v in inst.x0]
    return json.dumps(data, indent=2)


def dump(inst: LpInstance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(inst))
        fh.write("\n")
