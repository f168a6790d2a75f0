"""Sparse multivariate Laurent polynomials with exact rational coefficients.

Every polynomial lives in a :class:`VarUniverse` of size ``n``, whose variables
are, in their fixed total order::

    X1 < ... < Xn < Q1 < ... < Qn < Y1 < ... < Yn < mu < z

Only ``z`` may carry negative exponents.  Polynomials are immutable and kept in
canonical form (no zero coefficients, no zero exponents), so ``==`` is semantic
equality.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Union

__all__ = [
    "PolyError",
    "UniverseMismatch",
    "VarUniverse",
    "Polynomial",
    "add",
    "mul",
    "partial",
    "substitute",
    "coeff_of",
    "eval_numeric",
    "is_in_V",
    "format_coeff",
]

# a monomial is a tuple of (variable id, nonzero exponent) pairs sorted by id
Monomial = tuple
Scalar = Union[int, Fraction]


class PolyError(ValueError):
    pass


class UniverseMismatch(PolyError):
    pass


_NAME_RE = re.compile(r"^(X|Q|Y)([1-9][0-9]*)$")


@dataclass(frozen=True)
class VarUniverse:
    """Variable ids for a lattice of size ``n``.

    Ids are ``0 .. 3n+1``: X_i -> i-1, Q_i -> n+i-1, Y_i -> 2n+i-1,
    mu -> 3n, z -> 3n+1.
    """

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise PolyError(f"lattice size must be a positive integer, got {self.n!r}")

    @property
    def nvars(self) -> int:
        return 3 * self.n + 2

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise PolyError(f"index {i} out of range 1..{self.n}")

    def x_id(self, i: int) -> int:
        self._check_index(i)
        return i - 1

    def q_id(self, i: int) -> int:
        self._check_index(i)
        return self.n + i - 1

    def y_id(self, i: int) -> int:
        self._check_index(i)
        return 2 * self.n + i - 1

    @property
    def mu_id(self) -> int:
        return 3 * self.n

    @property
    def z_id(self) -> int:
        return 3 * self.n + 1

    def name(self, vid: int) -> str:
        n = self.n
        if 0 <= vid < n:
            return f"X{vid + 1}"
        if n <= vid < 2 * n:
            return f"Q{vid - n + 1}"
        if 2 * n <= vid < 3 * n:
            return f"Y{vid - 2 * n + 1}"
        if vid == self.mu_id:
            return "mu"
        if vid == self.z_id:
            return "z"
        raise PolyError(f"no variable with id {vid} when n={n}")

    def var_id(self, name: str) -> int:
        if name == "mu":
            return self.mu_id
        if name == "z":
            return self.z_id
        m = _NAME_RE.match(name)
        if not m:
            raise PolyError(f"unknown variable {name!r}")
        kind, i = m.group(1), int(m.group(2))
        if i > self.n:
            raise PolyError(f"variable {name} out of range for n={self.n}")
        return {"X": self.x_id, "Q": self.q_id, "Y": self.y_id}[kind](i)

    def kind(self, vid: int) -> str:
        n = self.n
        if vid < n:
            return "X"
        if vid < 2 * n:
            return "Q"
        if vid < 3 * n:
            return "Y"
        return "mu" if vid == self.mu_id else "z"

    # convenience constructors

    def var(self, vid: int) -> "Polynomial":
        if not 0 <= vid < self.nvars:
            raise PolyError(f"no variable with id {vid} when n={self.n}")
        return Polynomial(self, {((vid, 1),): Fraction(1)})

    def X(self, i: int) -> "Polynomial":
        return self.var(self.x_id(i))

    def Q(self, i: int) -> "Polynomial":
        return self.var(self.q_id(i))

    def Y(self, i: int) -> "Polynomial":
        return self.var(self.y_id(i))

    @property
    def mu(self) -> "Polynomial":
        return self.var(self.mu_id)

    @property
    def z(self) -> "Polynomial":
        return self.var(self.z_id)

    def const(self, c: Scalar) -> "Polynomial":
        return Polynomial(self, {(): Fraction(c)} if c else {})

    @property
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    @property
    def one(self) -> "Polynomial":
        return self.const(1)

    def monomial(self, exps: Mapping[str, int], coeff: Scalar = 1) -> "Polynomial":
        """Build ``coeff * prod(v**e)`` from a name -> exponent mapping."""
        mono = tuple(sorted((self.var_id(k), e) for k, e in exps.items() if e))
        return Polynomial(self, {mono: Fraction(coeff)} if coeff else {})


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for v, e in b:
        s = out.get(v, 0) + e
        if s:
            out[v] = s
        else:
            del out[v]
    return tuple(sorted(out.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _order_key(m: Monomial, nvars: int):
    # graded first, ties broken lexicographically with the highest variable
    # most significant; used both for printing and for division
    dense = [0] * nvars
    for v, e in m:
        dense[v] = e
    return (_mono_degree(m), tuple(reversed(dense)))


def format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class Polynomial:
    """Immutable element of Q[X, Q, Y, mu, z, 1/z] over a fixed universe."""

    def __init__(self, universe: VarUniverse, terms: Mapping[Monomial, Fraction]):
        self.universe = universe
        clean = {}
        for m, c in terms.items():
            if not c:
                continue
            for v, e in m:
                if e < 0 and v != universe.z_id:
                    raise PolyError(
                        f"negative exponent on {universe.name(v)}; only z may be inverted"
                    )
            clean[m] = c if isinstance(c, Fraction) else Fraction(c)
        self._terms = clean

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in canonical print order: degree descending, then ascending
        lex with the highest variable most significant."""
        nv = self.universe.nvars
        return sorted(
            self._terms.items(),
            key=lambda mc: (-_mono_degree(mc[0]), _order_key(mc[0], nv)[1]),
        )

    def variables(self) -> set[int]:
        return {v for m in self._terms for v, _ in m}

    def exponent_range(self, vid: int) -> tuple[int, int]:
        exps = [dict(m).get(vid, 0) for m in self._terms] or [0]
        return min(exps), max(exps)

    def constant_value(self) -> Fraction | None:
        """The rational value if this is a constant, else None."""
        if not self._terms:
            return Fraction(0)
        if list(self._terms) == [()]:
            return self._terms[()]
        return None

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.universe != self.universe:
                raise UniverseMismatch(
                    f"universe n={self.universe.n} vs n={other.universe.n}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return self.universe.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(self.universe, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.universe, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Polynomial(self.universe, out)

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return self.universe.zero
        return Polynomial(self.universe, {m: c * v for m, v in self._terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            inv = self.inverse()
            return inv ** (-k)
        result = self.universe.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "Polynomial":
        """Inverse of a unit, i.e. of ``c * z**k`` with ``c != 0``."""
        if len(self._terms) == 1:
            ((m, c),) = self._terms.items()
            if all(v == self.universe.z_id for v, _ in m):
                return Polynomial(self.universe, {tuple((v, -e) for v, e in m): 1 / c})
        raise PolyError(f"{self} is not invertible (only c*z^k units exist)")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.universe.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.universe == other.universe and self._terms == other._terms

    def __hash__(self):
        return hash((self.universe, frozenset(self._terms.items())))

    # -- division ----------------------------------------------------------

    def exact_div(self, divisor: "Polynomial") -> "Polynomial":
        """Quotient of an exact division; raises PolyError if not exact."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        U = self.universe
        nv = U.nvars
        if self.is_zero():
            return U.zero
        zid = U.z_id
        zlo = self.exponent_range(zid)[0] - divisor.exponent_range(zid)[0]
        zhi = self.exponent_range(zid)[1] - divisor.exponent_range(zid)[1]

        def neg_key(m):
            deg, lex = _order_key(m, nv)
            return (-deg, tuple(-e for e in lex))

        gm, gc = min(divisor._terms.items(), key=lambda mc: neg_key(mc[0]))
        ginv = tuple((v, -e) for v, e in gm)
        gterms = list(divisor._terms.items())
        rem = dict(self._terms)
        # max-heap on the monomial order, stale entries skipped on pop
        heap = [(neg_key(m), m) for m in rem]
        heapq.heapify(heap)
        quot: dict = {}
        while rem:
            _, fm = heapq.heappop(heap)
            fc = rem.get(fm)
            if fc is None:
                continue
            qm = _mono_mul(fm, ginv)
            for v, e in qm:
                if v == zid:
                    if not zlo <= e <= zhi:
                        raise PolyError("division is not exact")
                elif e < 0:
                    raise PolyError("division is not exact")
            qc = fc / gc
            quot[qm] = qc
            for m2, c2 in gterms:
                m = _mono_mul(qm, m2)
                old = rem.get(m)
                s = (old or 0) - qc * c2
                if s:
                    rem[m] = s
                    if old is None:
                        heapq.heappush(heap, (neg_key(m), m))
                elif old is not None:
                    del rem[m]
        return Polynomial(U, quot)

    # -- formatting ----------------------------------------------------------

    def _mono_str(self, m: Monomial) -> str:
        parts = []
        for v, e in m:
            name = self.universe.name(v)
            parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            a = -c if neg else c
            body = self._mono_str(m)
            if not body:
                s = format_coeff(a)
            elif a == 1:
                s = body
            else:
                s = f"{format_coeff(a)}*{body}"
            if i == 0:
                out.append(f"-{s}" if neg else s)
            else:
                out.append(f" - {s}" if neg else f" + {s}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Polynomial(n={self.universe.n}, {self})"

    def to_json(self) -> dict:
        U = self.universe
        return {
            "vars": {"n": U.n},
            "terms": [
                {"coeff": format_coeff(c), "exps": {U.name(v): e for v, e in m}}
                for m, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Polynomial":
        try:
            U = VarUniverse(int(data["vars"]["n"]))
            terms: dict = {}
            for t in data["terms"]:
                m = tuple(sorted((U.var_id(k), int(e)) for k, e in t["exps"].items() if e))
                c = Fraction(t["coeff"])
                terms[m] = terms.get(m, 0) + c
        except (KeyError, TypeError, ValueError) as exc:
            raise PolyError(f"malformed polynomial JSON: {exc}") from exc
        return cls(U, terms)

    # -- the named operations, also reachable as methods ----------------------

    def partial(self, vid: int) -> "Polynomial":
        return partial(self, vid)

    def substitute(self, vid: int, r: "Polynomial") -> "Polynomial":
        return substitute(self, vid, r)

    def coeff_of(self, vid: int, k: int) -> "Polynomial":
        return coeff_of(self, vid, k)

    def eval(self, assignment):
        return eval_numeric(self, assignment)

    @cached_property
    def _float_terms(self):
        return [(float(c), m) for m, c in self._terms.items()]


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def partial(p: Polynomial, vid: int) -> Polynomial:
    """Formal partial derivative with respect to variable ``vid``."""
    out: dict = {}
    for m, c in p._terms.items():
        d = dict(m)
        e = d.get(vid, 0)
        if e < 0:
            raise PolyError(
                f"refusing to differentiate in {p.universe.name(vid)}: negative exponent present"
            )
        if e == 0:
            continue
        if e == 1:
            del d[vid]
        else:
            d[vid] = e - 1
        nm = tuple(sorted(d.items()))
        out[nm] = out.get(nm, 0) + c * e
    return Polynomial(p.universe, out)


def _split_by_power(p: Polynomial, vid: int) -> dict[int, dict]:
    groups: dict[int, dict] = {}
    for m, c in p._terms.items():
        d = dict(m)
        e = d.pop(vid, 0)
        groups.setdefault(e, {})[tuple(sorted(d.items()))] = c
    return groups


def substitute(p: Polynomial, vid: int, r: Polynomial) -> Polynomial:
    """Replace every occurrence of ``vid`` in ``p`` by ``r``."""
    r = p._coerce(r)
    U = p.universe
    result = U.zero
    powers: dict[int, Polynomial] = {}
    for e, rest in sorted(_split_by_power(p, vid).items()):
        if e not in powers:
            if e < 0:
                try:
                    powers[e] = r.inverse() ** (-e)
                except PolyError:
                    raise PolyError(
                        f"cannot substitute {r} into {U.name(vid)}^{e}: not a unit"
                    ) from None
            else:
                powers[e] = r**e
        result = result + Polynomial(U, rest) * powers[e]
    return result


def coeff_of(p: Polynomial, vid: int, k: int) -> Polynomial:
    """Coefficient of ``v**k`` in ``p``, as a polynomial free of ``v``."""
    return Polynomial(p.universe, _split_by_power(p, vid).get(k, {}))


def eval_numeric(p: Polynomial, assignment: Mapping):
    """Evaluate ``p`` numerically.

    ``assignment`` maps variable ids (or names) to numbers; numpy arrays work
    too and are evaluated elementwise.
    """
    U = p.universe
    vals = {}
    for k, v in assignment.items():
        vals[U.var_id(k) if isinstance(k, str) else k] = v
    total = 0.0
    for c, m in p._float_terms:
        term = c
        for v, e in m:
            try:
                x = vals[v]
            except KeyError:
                raise PolyError(f"no value assigned to {U.name(v)}") from None
            if e < 0 and _is_zero_value(x):
                raise PolyError(f"{U.name(v)} = 0 raised to negative power {e}")
            term = term * x**e
        total = total + term
    return total


def _is_zero_value(x) -> bool:
    try:
        return bool(x == 0)
    except ValueError:
        return bool((x == 0).any())


def is_in_V(p: Polynomial) -> bool:
    """True iff ``p`` is a Q-linear combination of squarefree X-monomials."""
    U = p.universe
    for m in p._terms:
        for v, e in m:
            kind = U.kind(v)
            if kind == "X":
                if e != 1:
                    return False
            elif kind != "Q":
                return False
    return True


def elementary_symmetric(U: VarUniverse, k: int, indices: Iterable[int] | None = None) -> Polynomial:
    """e_k of X_i for i in ``indices`` (default 1..n)."""
    idx = list(range(1, U.n + 1) if indices is None else indices)
    # generating-function recurrence: e_k(x_1..x_m) = e_k(x_1..x_{m-1}) + x_m e_{k-1}(...)
    e = [U.one] + [U.zero] * k
    for i in idx:
        xi = U.X(i)
        for j in range(k, 0, -1):
            e[j] = e[j] + xi * e[j - 1]
    return e[k]


def monomial_to_str(U: VarUniverse, m: Monomial) -> str:
    return Polynomial(U, {m: Fraction(1)})._mono_str(m) or "1"



def rename(p: Polynomial, perm: Mapping[int, int]) -> Polynomial:
    """Apply a variable renaming ``vid -> vid`` simultaneously to every term."""
    out: dict = {}
    for m, c in p._terms.items():
        nm = tuple(sorted((perm.get(v, v), e) for v, e in m))
        out[nm] = out.get(nm, 0) + c
    return Polynomial(p.universe, out)
