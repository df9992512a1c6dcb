"""Bell-type inequality evaluators over document pairs and composite states."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .composite import CompositeState, composite_expectation, tensor_observable
from .hilbert import (
    DocumentState,
    InputError,
    Observable,
    dimension_expectation,
)

VIOLATION_TOL = 1e-10


class Form(str, enum.Enum):
    CHSH_TRACE = "chsh_trace"
    CHSH_PROBABILITY = "chsh_probability"
    N_SETTINGS = "n_settings"
    CHSH_COMPOSITE = "chsh_composite"


ABSOLUTE_FORMS = frozenset({Form.CHSH_TRACE, Form.N_SETTINGS, Form.CHSH_COMPOSITE})


@dataclass(frozen=True)
class BellResult:
    """One inequality evaluation.

    ``signed`` is the weighted sum of ``terms``. Absolute-value forms report
    ``statistic = |signed|`` against ``bound_high`` only; the probability form
    reports ``statistic = signed`` against ``[bound_low, bound_high]``.
    """

    form: Form
    statistic: float
    signed: float
    bound_low: float | None
    bound_high: float
    violated: bool
    terms: Mapping[str, float]
    weights: Mapping[str, int]
    metadata: Mapping[str, object] = field(default_factory=dict)

    def recompute(self) -> float:
        signed = math.fsum(self.weights[k] * v for k, v in self.terms.items())
        return abs(signed) if self.form in ABSOLUTE_FORMS else signed


def _make_result(form, terms, weights, bound_low, bound_high, metadata) -> BellResult:
    signed = math.fsum([weights[k] * v for k, v in terms.items()])
    statistic = abs(signed) if form in ABSOLUTE_FORMS else signed
    violated = statistic > bound_high + VIOLATION_TOL
    if bound_low is not None:
        violated = violated or statistic < bound_low - VIOLATION_TOL
    return BellResult(
        form=form,
        statistic=statistic,
        signed=signed,
        bound_low=bound_low,
        bound_high=bound_high,
        violated=violated,
        terms=terms,
        weights=weights,
        metadata=metadata,
    )


def _require(doc: DocumentState, dims: Sequence[str]) -> None:
    for dim in dims:
        doc.pair(dim)


def pair_expectation_independent(
    d1: DocumentState, dim_a: str, d2: DocumentState, dim_b: str
) -> float:
    """<AB> for independent outcomes: equals (2 p1 - 1)(2 p2 - 1)."""
    p1 = d1.probability(dim_a)
    p2 = d2.probability(dim_b)
    q1, q2 = 1.0 - p1, 1.0 - p2
    return p1 * p2 + q1 * q2 - p1 * q2 - q1 * p2


def _agree(p: float, q: float) -> float:
    return p * q + (1.0 - p) * (1.0 - q)


def chsh_probability(d1: DocumentState, d2: DocumentState, dims: Sequence[str]) -> BellResult:
    """Probability form of CHSH under P(AB) = P(A) P(B); classical range [1, 3]."""
    if len(dims) != 2:
        raise InputError("chsh_probability needs exactly two dimensions")
    x, y = dims
    _require(d1, dims)
    _require(d2, dims)
    px1, py1 = d1.probability(x), d1.probability(y)
    px2, py2 = d2.probability(x), d2.probability(y)
    terms = {
        f"P({x}1*{x}2=+1)": _agree(px1, px2),
        f"P({x}1*{y}2=+1)": _agree(px1, py2),
        f"P({y}1*{x}2=+1)": _agree(py1, px2),
        f"P({y}1*{y}2=-1)": 1.0 - _agree(py1, py2),
    }
    weights = dict.fromkeys(terms, 1)
    return _make_result(
        Form.CHSH_PROBABILITY, terms, weights, 1.0, 3.0, {"dimensions": [x, y]}
    )


def chsh_trace(d1: DocumentState, d2: DocumentState, dims: Sequence[str]) -> BellResult:
    """CHSH from trace-rule expectations of product states.

    The first dimension is the standard basis H and the second supplies N.
    """
    if len(dims) != 2:
        raise InputError("chsh_trace needs exactly two dimensions")
    h, n = dims
    _require(d1, dims)
    _require(d2, dims)
    d1, d2 = d1.with_standard(h), d2.with_standard(h)
    e1 = {dim: dimension_expectation(d1, dim) for dim in (h, n)}
    e2 = {dim: dimension_expectation(d2, dim) for dim in (h, n)}
    terms = {}
    weights = {}
    for a, b, w in ((h, h, 1), (h, n, 1), (n, h, 1), (n, n, -1)):
        label = f"E({a}1*{b}2)"
        terms[label] = e1[a] * e2[b]
        weights[label] = w
    return _make_result(
        Form.CHSH_TRACE, terms, weights, None, 2.0, {"dimensions": [h, n], "standard": h}
    )


def chsh_composite(
    psi: CompositeState,
    a1: Observable,
    a2: Observable,
    b1: Observable,
    b2: Observable,
) -> BellResult:
    """CHSH on an arbitrary two-document state, entangled or not."""
    terms = {}
    weights = {}
    for (la, a), (lb, b), w in (
        (("A1", a1), ("B1", b1), 1),
        (("A1", a1), ("B2", b2), 1),
        (("A2", a2), ("B1", b1), 1),
        (("A2", a2), ("B2", b2), -1),
    ):
        label = f"E({la}*{lb})"
        terms[label] = composite_expectation(tensor_observable(a, b), psi)
        weights[label] = w
    return _make_result(Form.CHSH_COMPOSITE, terms, weights, None, 2.0, {})


def optimal_chsh_observables() -> tuple[Observable, Observable, Observable, Observable]:
    """(A1, A2, B1, B2) reaching 2*sqrt(2) on phi_plus.

    +1 eigenvectors at angles 0 and pi/4 for the first document and pi/8 and
    -pi/8 for the second; on phi_plus <A(x) (x) B(y)> = cos(2(x - y)).
    """
    a1, a2 = Observable.at_angle(0.0), Observable.at_angle(math.pi / 4)
    b1, b2 = Observable.at_angle(math.pi / 8), Observable.at_angle(-math.pi / 8)
    return a1, a2, b1, b2


def n_settings_bound(n: int) -> int:
    return (n * n + 1) // 2


def n_settings_sign(n: int, j: int, k: int) -> int:
    """Sign of E(A_j B_k) in the n-settings sum (1-based j, k)."""
    return 1 if k <= n + 1 - j else -1


def n_settings(d1: DocumentState, d2: DocumentState, dims: Sequence[str]) -> BellResult:
    n = len(dims)
    if n < 2:
        raise InputError(f"n_settings needs at least 2 dimensions, got {n}")
    _require(d1, dims)
    _require(d2, dims)
    e1 = [dimension_expectation(d1, dim) for dim in dims]
    e2 = [dimension_expectation(d2, dim) for dim in dims]
    labels = [f"E({a}1*{b}2)" for a in dims for b in dims]
    terms = dict(zip(labels, [x * y for x in e1 for y in e2]))
    weights = dict(
        zip(labels, [n_settings_sign(n, j, k) for j in range(1, n + 1) for k in range(1, n + 1)])
    )
    return _make_result(
        Form.N_SETTINGS,
        terms,
        weights,
        None,
        float(n_settings_bound(n)),
        {"dimensions": list(dims)},
    )


@dataclass(frozen=True)
class SuiteConfig:
    dimensions: tuple[str, ...]
    forms: tuple[Form, ...] = (Form.CHSH_TRACE, Form.CHSH_PROBABILITY, Form.N_SETTINGS)


_PAIR_FORMS = {Form.CHSH_TRACE: chsh_trace, Form.CHSH_PROBABILITY: chsh_probability}


def run_suite(d1: DocumentState, d2: DocumentState, config: SuiteConfig) -> list[BellResult]:
    """Every requested form: CHSH over all dimension pairs, n-settings over all."""
    shared = set(d1.dimensions) & set(d2.dimensions)
    dims = [dim for dim in config.dimensions if dim in shared]
    if not dims:
        raise InputError(
            f"documents {d1.doc_id!r} and {d2.doc_id!r} share no configured dimension"
        )
    missing = [dim for dim in config.dimensions if dim not in shared]
    if missing:
        raise InputError(
            f"documents {d1.doc_id!r}/{d2.doc_id!r} lack dimensions {missing}"
        )
    results = []
    for form in config.forms:
        form = Form(form)
        if form in _PAIR_FORMS:
            evaluate = _PAIR_FORMS[form]
            results.extend(evaluate(d1, d2, pair) for pair in itertools.combinations(dims, 2))
        elif form is Form.N_SETTINGS:
            results.append(n_settings(d1, d2, dims))
        else:
            raise InputError(f"form {form.value} cannot be run on a document pair")
    return results
