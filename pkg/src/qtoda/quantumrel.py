"""Classical and quantum relations of the (periodic) flag manifold, the X <-> Y
change of variables, the evaluation-map conversions on V, and the identity
checks tying the relations to the Toda conserved quantities."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .laxdet import Variant, conserved, open_char_poly_recursive, periodic_from_open
from .operators import Kind, OperatorChain, apply_chain
from .polyring import (
    Polynomial,
    PolyError,
    VarUniverse,
    coeff_of,
    is_in_V,
    monomial_to_str,
    substitute,
)

__all__ = [
    "Family",
    "Boundary",
    "RelationFamily",
    "VerifyRow",
    "s_poly",
    "qs_family",
    "qs_hat_family",
    "to_y_basis",
    "ev_q_normal_form",
    "ev_c_from_quantum",
    "verify_theorem31",
    "verify_cor42",
    "verify_prop32_1",
    "verify_prop32_2",
    "verify_prop23",
    "verify_degeneration",
    "SUITES",
    "run_suites",
]


class Family(enum.Enum):
    PERIODIC = "periodic"
    OPEN_HAT = "open-hat"


class Boundary(enum.Enum):
    CYCLIC = "cyclic"  # Y_0 = Y_n
    ZERO = "zero"  # Y_0 = Y_n = 0


@dataclass(frozen=True)
class RelationFamily:
    n: int
    variant: Family
    relations: tuple[Polynomial, ...]
    basis: str = "X"

    @property
    def boundary(self) -> Boundary:
        return Boundary.CYCLIC if self.variant is Family.PERIODIC else Boundary.ZERO

    def in_y_basis(self) -> "RelationFamily":
        if self.basis == "Y":
            return self
        rels = tuple(to_y_basis(p, self.boundary) for p in self.relations)
        return RelationFamily(self.n, self.variant, rels, "Y")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "variant": self.variant.value,
            "basis": self.basis,
            "relations": [p.to_json() for p in self.relations],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RelationFamily":
        try:
            rels = tuple(Polynomial.from_json(p) for p in data["relations"])
            fam = cls(int(data["n"]), Family(data["variant"]), rels, data["basis"])
        except (KeyError, TypeError, ValueError) as exc:
            raise PolyError(f"malformed relation family JSON: {exc}") from exc
        if fam.basis not in ("X", "Y"):
            raise PolyError(f"unknown basis {fam.basis!r}")
        return fam


@lru_cache(maxsize=None)
def s_poly(n: int) -> Polynomial:
    """(X_1 + mu) ... (X_n + mu), expanded."""
    U = VarUniverse(n)
    S = U.one
    for i in range(1, n + 1):
        S = S * (U.X(i) + U.mu)
    return S


def _split_mu(p: Polynomial, n: int) -> tuple[Polynomial, ...]:
    mu = p.universe.mu_id
    return tuple(coeff_of(p, mu, k) for k in range(n + 1))


@lru_cache(maxsize=None)
def qs_family(n: int) -> RelationFamily:
    if n < 2:
        raise PolyError("quantum relations need n >= 2")
    chain = OperatorChain.descending(Kind.D, n)
    return RelationFamily(n, Family.PERIODIC, _split_mu(apply_chain(chain, s_poly(n)), n))


@lru_cache(maxsize=None)
def qs_hat_family(n: int) -> RelationFamily:
    if n < 2:
        raise PolyError("quantum relations need n >= 2")
    chain = OperatorChain.descending(Kind.D, n, top=n - 1)
    return RelationFamily(n, Family.OPEN_HAT, _split_mu(apply_chain(chain, s_poly(n)), n))


def to_y_basis(p: Polynomial, boundary: Boundary = Boundary.CYCLIC) -> Polynomial:
    """Rewrite ``p`` with X_i = Y_i - Y_{i-1}.

    CYCLIC reads Y_0 as Y_n; ZERO sets Y_0 = Y_n = 0.
    """
    boundary = Boundary(boundary)
    U = p.universe
    n = U.n
    if any(U.kind(v) == "Y" for v in p.variables()):
        raise PolyError("polynomial already contains Y variables")

    def y(i: int) -> Polynomial:
        if boundary is Boundary.CYCLIC:
            return U.Y(n if i == 0 else i)
        return U.zero if i in (0, n) else U.Y(i)

    for i in range(1, n + 1):
        p = substitute(p, U.x_id(i), y(i) - y(i - 1))
    return p


def _require_V(p: Polynomial) -> None:
    if is_in_V(p):
        return
    U = p.universe
    for m, _ in p.sorted_terms():
        if not is_in_V(Polynomial(U, {m: 1})):
            raise PolyError(f"not in V: monomial {monomial_to_str(U, m)}")


def ev_q_normal_form(p: Polynomial) -> Polynomial:
    """Apply delta_n ... delta_1: replaces each adjacent X_i X_{i+1} by
    X_i X_{i+1} - Q_i."""
    _require_V(p)
    return apply_chain(OperatorChain.descending(Kind.DELTA, p.universe.n), p)


def ev_c_from_quantum(p: Polynomial) -> Polynomial:
    """Apply D_n ... D_1, the inverse of :func:`ev_q_normal_form` on V."""
    _require_V(p)
    return apply_chain(OperatorChain.descending(Kind.D, p.universe.n), p)


def squarefree_monomials(n: int, degree: int | None = None):
    U = VarUniverse(n)
    degrees = range(1, n + 1) if degree is None else (degree,)
    for k in degrees:
        for idx in itertools.combinations(range(1, n + 1), k):
            m = U.one
            for i in idx:
                m = m * U.X(i)
            yield m


# -- verification ----------------------------------------------------------


@dataclass(frozen=True)
class VerifyRow:
    suite: str
    n: int
    k: int | str
    status: str
    witness: Polynomial | None = field(default=None, compare=False)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "n": self.n,
            "k": self.k,
            "status": self.status,
            "witness": None if self.witness is None else str(self.witness),
        }


def _row(suite: str, n: int, k, lhs: Polynomial, rhs: Polynomial) -> VerifyRow:
    diff = lhs - rhs
    if diff.is_zero():
        return VerifyRow(suite, n, k, "pass")
    return VerifyRow(suite, n, k, "fail", diff)


def verify_theorem31(n: int) -> list[VerifyRow]:
    """QS^k_n against the z^0 mu^k coefficient of the periodic determinant."""
    qs = qs_family(n).relations
    P = conserved(n, Variant.PERIODIC).coefficients
    return [_row("thm31", n, k, qs[k], P[k]) for k in range(n + 1)]


def verify_cor42(n: int) -> list[VerifyRow]:
    hat = qs_hat_family(n).relations
    O = conserved(n, Variant.OPEN).coefficients
    return [_row("cor42", n, k, hat[k], O[k]) for k in range(n + 1)]


def verify_prop32_1(n: int) -> list[VerifyRow]:
    """Recursive O_n against both determinant algorithms, per mu-coefficient."""
    rec = _split_mu(open_char_poly_recursive(n), n)
    cof = conserved(n, Variant.OPEN, "cofactor").coefficients
    bar = conserved(n, Variant.OPEN, "bareiss").coefficients
    rows = []
    for k in range(n + 1):
        row = _row("prop32-1", n, k, rec[k], cof[k])
        if row.passed:
            row = _row("prop32-1", n, k, rec[k], bar[k])
        rows.append(row)
    return rows


def verify_prop32_2(n: int) -> list[VerifyRow]:
    """The assembly D_n O_n + z + (-1)^(n+1) Q_1..Q_n/z against the periodic
    determinant: rows k = 0..n for the z^0 part, then "A" (z^-1) and "B" (z^1)."""
    assembled = periodic_from_open(n)
    U = assembled.universe
    det = conserved(n, Variant.PERIODIC)
    mine = _split_mu(coeff_of(assembled, U.z_id, 0), n)
    rows = [_row("prop32-2", n, k, mine[k], det.coefficients[k]) for k in range(n + 1)]
    rows.append(_row("prop32-2", n, "A", coeff_of(assembled, U.z_id, -1), det.a_term))
    rows.append(_row("prop32-2", n, "B", coeff_of(assembled, U.z_id, 1), det.b_term))
    return rows


def verify_prop23(n: int) -> list[VerifyRow]:
    """Round trips D-chain o delta-chain and delta-chain o D-chain on every
    squarefree X-monomial, one row per monomial degree."""
    Dc = OperatorChain.descending(Kind.D, n)
    dc = OperatorChain.descending(Kind.DELTA, n)
    rows = []
    for k in range(1, n + 1):
        row = VerifyRow("prop23", n, k, "pass")
        for m in squarefree_monomials(n, k):
            for first, second in ((dc, Dc), (Dc, dc)):
                r = _row("prop23", n, k, apply_chain(second, apply_chain(first, m)), m)
                if not r.passed:
                    row = r
                    break
            if not row.passed:
                break
        rows.append(row)
    return rows


def verify_degeneration(n: int) -> list[VerifyRow]:
    """QS^k_n with Q_n = 0 against the open-hat relations."""
    U = VarUniverse(n)
    per = qs_family(n).relations
    hat = qs_hat_family(n).relations
    return [
        _row("degeneration", n, k, substitute(per[k], U.q_id(n), U.zero), hat[k])
        for k in range(n + 1)
    ]


# suite name -> (checker, smallest admissible n)
SUITES: dict[str, tuple[Callable[[int], list[VerifyRow]], int]] = {
    "thm31": (verify_theorem31, 3),
    "cor42": (verify_cor42, 2),
    "prop32-1": (verify_prop32_1, 1),
    "prop32-2": (verify_prop32_2, 3),
    "prop23": (verify_prop23, 1),
    "degeneration": (verify_degeneration, 3),
}


def run_suites(n_max: int, which=None) -> list[VerifyRow]:
    names = list(SUITES) if which is None else list(which)
    rows = []
    for name in names:
        check, n_min = SUITES[name]
        for n in range(n_min, n_max + 1):
            rows.extend(check(n))
    return rows
