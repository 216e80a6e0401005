"""Exact formal splitting of Weierstrass polynomials z^k + a_2 z^(k-2) + ... + a_k
over series rings in w^(1/p), u and x/w^q, with the blow-up and ramification
transforms, lemma checks and a command-line front end."""

from .coefficients import Cyclotomic, FieldElem, field_elem, rational, u_var, zeta
from .errors import FormalSplitError
from .instances import PRESETS, Instance, preset, random_instance
from .series import ExpPair, LaurentSeries, PuiseuxSeries, compare_support, substitute, support_key
from .splitting import (
    Point,
    SplitResult,
    atw_proxy,
    factor_linear_forms,
    is_nc,
    lift_roots,
    lowest_homogeneous_part,
    mu_p_action,
    split,
    translate,
)
from .transforms import TransformLog, blowup_chart, blowup_origin, ramify, replay, rescale_q
from .verify import (
    LemmaReport,
    realized_pq,
    verify_clopen,
    verify_homog,
    verify_negpower,
    verify_p1,
    verify_q0,
    verify_sigma_identity,
)
from .weierstrass import RootSystem, WeierstrassPoly, elementary_symmetric, from_roots, tschirnhaus_normalize

__version__ = "0.1.0"
