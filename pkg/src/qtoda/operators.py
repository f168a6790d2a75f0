"""Second-order operators ``Id -/+ Q_i d^2/dX_i dX_{i+1}`` and chains of them.

Indices are cyclic: the partner of ``X_n`` is ``X_1``.  Chains are written
left to right and applied right to left, so ``D3*D2*D1`` applies ``D1`` first.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .polyring import Polynomial, PolyError, partial

__all__ = [
    "Kind",
    "OperatorChain",
    "apply_delta",
    "apply_D",
    "apply_chain",
    "mixed_second",
]


class Kind(enum.Enum):
    D = "D"
    DELTA = "delta"


def _partner(n: int, i: int) -> int:
    return i % n + 1


def mixed_second(i: int, p: Polynomial) -> Polynomial:
    """d^2 p / dX_i dX_{i+1}, with X_{n+1} read as X_1."""
    U = p.universe
    if not 1 <= i <= U.n:
        raise PolyError(f"operator index {i} out of range 1..{U.n}")
    return partial(partial(p, U.x_id(i)), U.x_id(_partner(U.n, i)))


def _apply(sign: int, i: int, p: Polynomial) -> Polynomial:
    corr = mixed_second(i, p)
    if not corr:
        return p
    corr = p.universe.Q(i) * corr
    return p + corr if sign > 0 else p - corr


def apply_delta(i: int, p: Polynomial) -> Polynomial:
    return _apply(-1, i, p)


def apply_D(i: int, p: Polynomial) -> Polynomial:
    return _apply(+1, i, p)


_FACTOR_RE = re.compile(r"^(D|delta)([1-9][0-9]*)$")


@dataclass(frozen=True)
class OperatorChain:
    """A product of D/delta factors, stored in written (left-to-right) order."""

    n: int
    factors: tuple[tuple[Kind, int], ...] = ()

    def __post_init__(self):
        for kind, i in self.factors:
            if not isinstance(kind, Kind):
                raise PolyError(f"bad operator kind {kind!r}")
            if not 1 <= i <= self.n:
                raise PolyError(f"operator index {i} out of range 1..{self.n}")

    @classmethod
    def descending(cls, kind: Kind, n: int, top: int | None = None) -> "OperatorChain":
        """``K_top * ... * K_1`` (default ``top = n``)."""
        top = n if top is None else top
        return cls(n, tuple((kind, i) for i in range(top, 0, -1)))

    @classmethod
    def parse(cls, text: str, n: int) -> "OperatorChain":
        text = text.strip()
        if not text or text == "Id":
            return cls(n)
        factors = []
        for tok in text.split("*"):
            m = _FACTOR_RE.match(tok.strip())
            if not m:
                raise PolyError(f"bad operator factor {tok!r}")
            kind = Kind.D if m.group(1) == "D" else Kind.DELTA
            factors.append((kind, int(m.group(2))))
        return cls(n, tuple(factors))

    def __str__(self) -> str:
        if not self.factors:
            return "Id"
        return "*".join(f"{k.value}{i}" for k, i in self.factors)

    def __mul__(self, other: "OperatorChain") -> "OperatorChain":
        if self.n != other.n:
            raise PolyError("chains over different lattice sizes")
        return OperatorChain(self.n, self.factors + other.factors)

    def __call__(self, p: Polynomial) -> Polynomial:
        return apply_chain(self, p)


def apply_chain(c: OperatorChain, p: Polynomial) -> Polynomial:
    if c.n != p.universe.n:
        raise PolyError(f"chain for n={c.n} applied to polynomial with n={p.universe.n}")
    for kind, i in reversed(c.factors):
        p = apply_D(i, p) if kind is Kind.D else apply_delta(i, p)
    return p

