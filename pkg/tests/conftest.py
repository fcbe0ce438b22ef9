import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from twoplectic.exterior import DifferentialForm, VectorField  # noqa: E402
from twoplectic.ring import Polynomial, monomials_up_to  # noqa: E402

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def polynomials(n, max_degree=3, max_terms=3, bound=3):
    term = st.tuples(
        st.sampled_from(monomials_up_to(n, max_degree)),
        st.fractions(min_value=-bound, max_value=bound, max_denominator=3),
    )
    return st.lists(term, max_size=max_terms).map(
        lambda ts: sum((Polynomial.monomial(e, c) for e, c in ts), Polynomial.zero(n))
    )


def forms(n, k, **kw):
    from itertools import combinations

    idx = list(combinations(range(1, n + 1), k))
    return st.lists(polynomials(n, **kw), min_size=len(idx), max_size=len(idx)).map(
        lambda ps: DifferentialForm(n, k, dict(zip(idx, ps)))
    )


def vector_fields(n, **kw):
    return st.lists(polynomials(n, **kw), min_size=n, max_size=n).map(VectorField)


# -- acceptance summary ---------------------------------------------------------

CRITERIA: dict[int, tuple[str, str]] = {}


def record(k, ok, detail=""):
    """Several tests may feed one criterion; it passes only if all of them do."""
    status, prev = CRITERIA.get(k, ("PASS", ""))
    status = status if ok else "FAIL"
    CRITERIA[k] = (status, "; ".join(p for p in (prev, detail) if p))


@pytest.fixture
def criterion():
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        status, detail = CRITERIA[k]
        terminalreporter.write_line(f"CRITERION {k}: {status} {detail}".rstrip())
