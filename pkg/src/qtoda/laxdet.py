"""Symbolic Lax matrices of the open and periodic Toda lattices and their
characteristic polynomials ``det(L + mu I)``."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

from .operators import apply_D
from .polyring import Polynomial, PolyError, VarUniverse, coeff_of

__all__ = [
    "Variant",
    "LaxMatrix",
    "ConservedSet",
    "build_lax",
    "char_poly",
    "det_cofactor",
    "det_bareiss",
    "conserved",
    "open_char_poly_recursive",
    "periodic_from_open",
]


class Variant(enum.Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class LaxMatrix:
    n: int
    variant: Variant
    entries: tuple[tuple[Polynomial, ...], ...]

    def __getitem__(self, ij):
        # 1-based, matching the usual matrix notation
        i, j = ij
        return self.entries[i - 1][j - 1]

    @property
    def universe(self) -> VarUniverse:
        return self.entries[0][0].universe

    def shifted(self) -> list[list[Polynomial]]:
        """Rows of ``L + mu I``."""
        mu = self.universe.mu
        return [
            [e + mu if i == j else e for j, e in enumerate(row)]
            for i, row in enumerate(self.entries)
        ]


def _check_size(n: int, variant: Variant) -> None:
    if not isinstance(n, int) or n < 1:
        raise PolyError(f"lattice size must be a positive integer, got {n!r}")
    if variant is Variant.PERIODIC and n < 3:
        raise PolyError("the periodic Lax matrix needs n >= 3")


def build_lax(n: int, variant: Variant = Variant.OPEN) -> LaxMatrix:
    variant = Variant(variant)
    _check_size(n, variant)
    U = VarUniverse(n)
    rows = [[U.zero] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = U.X(i + 1)
        if i + 1 < n:
            rows[i][i + 1] = U.Q(i + 1)
            rows[i + 1][i] = U.const(-1)
    if variant is Variant.PERIODIC:
        rows[0][n - 1] = -U.z
        rows[n - 1][0] = U.Q(n) * U.z ** -1
    return LaxMatrix(n, variant, tuple(tuple(r) for r in rows))


def det_cofactor(rows: list[list[Polynomial]]) -> Polynomial:
    """Laplace expansion along successive rows, memoised on the set of
    remaining columns."""
    n = len(rows)
    U = rows[0][0].universe
    memo: dict[int, Polynomial] = {}

    def minor(r: int, cols: int) -> Polynomial:
        if r == n:
            return U.one
        if cols in memo:
            return memo[cols]
        total = U.zero
        sign = 1
        for j in range(n):
            if not cols >> j & 1:
                continue
            a = rows[r][j]
            if a:
                sub = minor(r + 1, cols & ~(1 << j))
                if sub:
                    term = a * sub
                    total = total + term if sign > 0 else total - term
            sign = -sign
        memo[cols] = total
        return total

    return minor(0, (1 << n) - 1)


def det_bareiss(rows: list[list[Polynomial]]) -> Polynomial:
    """Fraction-free Gaussian elimination with exact polynomial division."""
    M = [list(r) for r in rows]
    n = len(M)
    U = M[0][0].universe
    sign = 1
    prev = U.one
    for k in range(n - 1):
        if not M[k][k]:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return U.zero
        pivot = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = pivot * M[i][j] - M[i][k] * M[k][j]
                M[i][j] = num.exact_div(prev) if k else num
            M[i][k] = U.zero
        prev = pivot
    det = M[n - 1][n - 1]
    return det if sign > 0 else -det


_DET_METHODS = {"cofactor": det_cofactor, "bareiss": det_bareiss}


def char_poly(m: LaxMatrix, method: str = "cofactor") -> Polynomial:
    """``det(m + mu I)``; ``method`` is ``"cofactor"`` or ``"bareiss"``."""
    try:
        det = _DET_METHODS[method]
    except KeyError:
        raise PolyError(f"unknown determinant method {method!r}") from None
    return det(m.shifted())


@lru_cache(maxsize=None)
def _char_poly_cached(n: int, variant: Variant, method: str) -> Polynomial:
    return char_poly(build_lax(n, variant), method)


@dataclass(frozen=True)
class ConservedSet:
    n: int
    variant: Variant
    coefficients: tuple[Polynomial, ...]
    a_term: Polynomial | None = None
    b_term: Polynomial | None = None

    def named(self) -> dict[str, Polynomial]:
        prefix = "O" if self.variant is Variant.OPEN else "P"
        out = {f"{prefix}{k}": c for k, c in enumerate(self.coefficients)}
        if self.variant is Variant.PERIODIC:
            out["A"] = self.a_term
            out["B"] = self.b_term
        return out

    def to_json(self) -> dict:
        return {k: p.to_json() for k, p in self.named().items()}


def split_conserved(p: Polynomial, n: int, variant: Variant) -> ConservedSet:
    U = p.universe
    z0 = coeff_of(p, U.z_id, 0)
    coeffs = tuple(coeff_of(z0, U.mu_id, k) for k in range(n + 1))
    if variant is Variant.OPEN:
        return ConservedSet(n, variant, coeffs)
    return ConservedSet(
        n, variant, coeffs,
        a_term=coeff_of(p, U.z_id, -1),
        b_term=coeff_of(p, U.z_id, 1),
    )


@lru_cache(maxsize=None)
def conserved(n: int, variant: Variant = Variant.OPEN, method: str = "cofactor") -> ConservedSet:
    variant = Variant(variant)
    _check_size(n, variant)
    return split_conserved(_char_poly_cached(n, variant, method), n, variant)


@lru_cache(maxsize=None)
def open_char_poly_recursive(n: int) -> Polynomial:
    """``O_n`` from ``O_1 = X1 + mu`` and ``O_{k+1} = D_k((X_{k+1} + mu) O_k)``.

    Each ``O_k`` is built in the size-``n`` universe, where ``D_k`` pairs
    ``X_k`` with ``X_{k+1}`` and never wraps around for ``k < n``.
    """
    _check_size(n, Variant.OPEN)
    U = VarUniverse(n)
    O = U.X(1) + U.mu
    for k in range(1, n):
        O = apply_D(k, (U.X(k + 1) + U.mu) * O)
    return O


@lru_cache(maxsize=None)
def periodic_from_open(n: int) -> Polynomial:
    """``D_n O_n + z + (-1)**(n+1) Q_1...Q_n / z``.

    The z^0 and z^-1 parts agree with ``char_poly`` of the periodic matrix.
    With the corner entry ``-z`` the determinant's z^1 coefficient is -1, so
    the ``+ z`` of this assembly does not; :func:`qtoda.quantumrel.verify_prop32_2`
    reports that row.
    """
    _check_size(n, Variant.PERIODIC)
    U = VarUniverse(n)
    prod_q = U.one
    for i in range(1, n + 1):
        prod_q = prod_q * U.Q(i)
    sign = 1 if (n + 1) % 2 == 0 else -1
    return apply_D(n, open_char_poly_recursive(n)) + U.z + prod_q.scale(sign) * U.z ** -1
