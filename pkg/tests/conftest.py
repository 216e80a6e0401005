import os
import sys

from gmpy2 import mpq
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from formal_split.coefficients import Cyclotomic, field_elem  # noqa: E402
from formal_split.series import PuiseuxSeries  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ORDERS = (3, 4, 6, 8, 12)

rationals = st.builds(lambda a, b: mpq(a, b), st.integers(-6, 6), st.integers(1, 4))
nonzero_rationals = rationals.filter(bool)


@st.composite
def cyclotomics(draw, orders=ORDERS):
    n = draw(st.sampled_from(orders))
    coeffs = draw(st.lists(rationals, min_size=1, max_size=4))
    return Cyclotomic(n, coeffs).demote()


@st.composite
def u_polys(draw, s=1, coeff=rationals, max_terms=3, max_deg=2):
    exps = draw(st.lists(st.tuples(*[st.integers(0, max_deg)] * s), min_size=1, max_size=max_terms))
    return {e: draw(coeff) for e in exps}


@st.composite
def field_elems(draw, s=1):
    num = draw(u_polys(s))
    den = draw(u_polys(s).filter(lambda d: any(d.values())))
    return field_elem(num, den, s)


tower = st.one_of(rationals, cyclotomics(), field_elems())
tower_q_zeta = st.one_of(rationals, cyclotomics())


@st.composite
def series(draw, p=1, q=0, nx=1, trunc=None, coeff=tower_q_zeta, max_terms=4, max_deg=3, unit=False):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        alpha = tuple(draw(st.integers(0, max_deg)) for _ in range(nx))
        a = draw(st.integers(0, max_deg + p * q * sum(alpha)))
        terms[(a,) + alpha] = draw(coeff)
    if unit:
        terms[(0,) * (1 + nx)] = draw(nonzero_rationals)
    return PuiseuxSeries(p, q, 1, nx, trunc, terms)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
