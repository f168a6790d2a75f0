from fractions import Fraction
import itertools

import pytest
from hypothesis import strategies as st

from qtoda.polyring import Polynomial, VarUniverse

U3 = VarUniverse(3)


@st.composite
def polynomials(draw, U=U3, laurent=True, max_terms=4, max_exp=2):
    """Small random polynomials over X, Q, mu (and z, possibly inverted)."""
    ids = [U.x_id(i) for i in range(1, U.n + 1)] + [U.q_id(i) for i in range(1, U.n + 1)]
    ids += [U.mu_id, U.z_id]
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = {}
        for v in draw(st.lists(st.sampled_from(ids), max_size=3, unique=True)):
            lo = -max_exp if (laurent and v == U.z_id) else 1
            exps[v] = draw(st.integers(lo, max_exp).filter(bool))
        m = tuple(sorted(exps.items()))
        c = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
        terms[m] = terms.get(m, 0) + c
    return Polynomial(U, terms)


def leibniz_det(rows):
    """Determinant as the signed sum over permutations; test oracle only."""
    n = len(rows)
    U = rows[0][0].universe
    total = U.zero
    for perm in itertools.permutations(range(n)):
        term = U.one
        for i, j in enumerate(perm):
            a = rows[i][j]
            if not a:
                term = None
                break
            term = term * a
        if term is None:
            continue
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        total = total + term if inversions % 2 == 0 else total - term
    return total


# acceptance criteria report, filled by tests/test_acceptance.py
ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for name in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(f"{ACCEPTANCE[name]:<5} {name}")


@pytest.fixture
def U():
    return U3
