"""Two-dimensional real Hilbert-space primitives for document states.

A document is a unit vector in R^2. Each relevance dimension supplies one
orthonormal basis (relevant, irrelevant) of that plane, and the document's
amplitudes in that basis come from min-max normalized ranking scores.
One dimension is picked as the *standard* basis; every other basis is
expressed in its coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

DEFAULT_DIMENSIONS = (
    "topicality",
    "reliability",
    "understandability",
    "interest",
    "habit",
    "scope",
    "novelty",
)

NORM_TOL = 1e-12
STRUCT_TOL = 1e-10


class InputError(ValueError):
    """Raised for invalid user-supplied data (scores, states, dimensions)."""


def validate_dimensions(dimensions: Sequence[str]) -> tuple[str, ...]:
    dims = tuple(dimensions)
    if len(dims) < 2:
        raise InputError(f"at least 2 dimensions required, got {len(dims)}")
    if len(set(dims)) != len(dims):
        raise InputError(f"duplicate dimension names in {list(dims)}")
    return dims


def _as_vector(v, name: str = "vector", tol: float = STRUCT_TOL) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.shape != (2,):
        raise InputError(f"{name} must be a 2-vector, got shape {arr.shape}")
    x, y = arr.tolist()
    if abs(math.hypot(x, y) - 1.0) > tol:
        raise InputError(f"{name} is not unit-norm: {[x, y]}")
    return arr


@dataclass(frozen=True)
class AmplitudePair:
    """Amplitudes (alpha, beta) of a state along (relevant, irrelevant)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise InputError(f"non-finite amplitudes ({self.alpha}, {self.beta})")
        if abs(self.alpha**2 + self.beta**2 - 1.0) > NORM_TOL:
            raise InputError(
                f"amplitudes ({self.alpha}, {self.beta}) are not normalized"
            )

    @classmethod
    def from_unnormalized(cls, alpha: float, beta: float) -> "AmplitudePair":
        """Rescale to unit norm, e.g. for values quoted to four digits."""
        norm = math.hypot(alpha, beta)
        if norm == 0.0:
            raise InputError("cannot normalize the zero vector")
        return cls(alpha / norm, beta / norm)

    @classmethod
    def from_probability(cls, p: float) -> "AmplitudePair":
        if not 0.0 <= p <= 1.0:
            raise InputError(f"probability {p} outside [0, 1]")
        return cls(math.sqrt(p), math.sqrt(1.0 - p))

    @property
    def probability(self) -> float:
        return self.alpha**2

    def as_vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta])


def minmax_normalize(scores: Sequence[float]) -> np.ndarray:
    """Min-max normalize to [0, 1]; a constant list maps to 0.5 everywhere."""
    lam = np.asarray(scores, dtype=np.float64)
    if lam.ndim != 1 or lam.size == 0:
        raise InputError("score list must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(lam)):
        raise InputError("score list contains non-finite values")
    lo, hi = lam.min(), lam.max()
    if hi == lo:
        return np.full(lam.shape, 0.5)
    return np.clip((lam - lo) / (hi - lo), 0.0, 1.0)


def amplitudes_from_scores(scores: Sequence[float], target_index: int) -> AmplitudePair:
    """Amplitude pair of one document from the scores of all documents of a query.

    ``alpha = sqrt(minmax(score))`` so that ``alpha**2`` is the probability of
    relevance along the dimension the scores were produced for.
    """
    normalized = minmax_normalize(scores)
    if not 0 <= target_index < normalized.size:
        raise InputError(
            f"target_index {target_index} out of range for {normalized.size} scores"
        )
    alpha = math.sqrt(normalized[target_index])
    return AmplitudePair(alpha, math.sqrt(1.0 - alpha * alpha))


def basis_change(psi: AmplitudePair, psi_alt: AmplitudePair) -> tuple[np.ndarray, np.ndarray]:
    """Express the (C, D) basis in (A, B) coordinates.

    ``psi`` holds the state's amplitudes (a, b) in basis (A, B) and ``psi_alt``
    its amplitudes (c, d) in basis (C, D). Returns the column vectors

        C = (ac + bd, bc - ad),   D = (ad - bc, ac + bd).
    """
    if not isinstance(psi, AmplitudePair) or not isinstance(psi_alt, AmplitudePair):
        raise InputError("basis_change expects two AmplitudePair values")
    a, b = psi.alpha, psi.beta
    c, d = psi_alt.alpha, psi_alt.beta
    u = a * c + b * d
    v = b * c - a * d
    return np.array([u, v]), np.array([-v, u])


def projection_probability(state, basis_vector) -> float:
    """Born-rule probability ``|<basis|state>|**2``."""
    s = _as_vector(state, "state")
    e = _as_vector(basis_vector, "basis_vector")
    return min(float(np.dot(e, s)) ** 2, 1.0)


def sequential_projection(state, ordered_bases: Sequence) -> float:
    """Probability of passing the chain state -> b1 -> b2 -> ... in order."""
    if len(ordered_bases) == 0:
        raise InputError("projection chain must contain at least one basis vector")
    prob = 1.0
    current = state
    for basis in ordered_bases:
        prob *= projection_probability(current, basis)
        current = basis
    return prob


@dataclass(frozen=True, eq=False)
class Observable:
    """A +/-1 valued measurement: real symmetric, traceless, squares to I."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64)
        if m.shape != (2, 2):
            raise InputError(f"observable must be 2x2, got {m.shape}")
        (p, q), (r, t) = m.tolist()
        if abs(q - r) > STRUCT_TOL:
            raise InputError("observable must be symmetric")
        if abs(p + t) > STRUCT_TOL:
            raise InputError(f"observable trace {p + t} is not zero")
        # m @ m = [[p^2 + qr, q(p + t)], [r(p + t), t^2 + qr]]
        if max(abs(p * p + q * r - 1.0), abs(t * t + q * r - 1.0),
               abs(q * (p + t)), abs(r * (p + t))) > STRUCT_TOL:
            raise InputError("observable does not square to the identity")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_basis(cls, relevant) -> "Observable":
        """Spectral form ``|r><r| - |r~><r~|`` with r the +1 eigenvector."""
        r = _as_vector(relevant, "relevant")
        r_perp = np.array([-r[1], r[0]])
        return cls(np.outer(r, r) - np.outer(r_perp, r_perp))

    @classmethod
    def at_angle(cls, theta: float) -> "Observable":
        """Observable whose +1 eigenvector is (cos theta, sin theta)."""
        return cls.from_basis([math.cos(theta), math.sin(theta)])

    def eigenvectors(self) -> tuple[np.ndarray, np.ndarray]:
        """(+1 eigenvector, -1 eigenvector)."""
        vals, vecs = np.linalg.eigh(self.matrix)
        return vecs[:, 1], vecs[:, 0]


PAULI_Z = Observable(np.diag([1.0, -1.0]))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64)
        if m.shape != (2, 2):
            raise InputError("density matrix must be 2x2")
        (p, q), (r, t) = m.tolist()
        if abs(q - r) > STRUCT_TOL:
            raise InputError("density matrix must be symmetric")
        if abs(p + t - 1.0) > NORM_TOL:
            raise InputError(f"density matrix trace {p + t} != 1")
        # symmetric 2x2 with unit trace: PSD iff the smaller eigenvalue is >= 0
        det = p * t - q * r
        low = 0.5 * (p + t) - math.sqrt(max(0.25 * (p - t) ** 2 + q * r, 0.0))
        if low < -STRUCT_TOL:
            raise InputError("density matrix is not positive semidefinite")
        if abs(det) > STRUCT_TOL:
            raise InputError("density matrix is not a pure state (rank > 1)")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_state(cls, state) -> "DensityMatrix":
        x, y = _as_vector(state, "state", tol=NORM_TOL).tolist()
        return cls(np.array([[x * x, x * y], [x * y, y * y]]))


def expectation(obs: Observable, rho: DensityMatrix) -> float:
    """Trace rule ``tr(obs @ rho)``."""
    # rho is symmetric, so tr(A rho) is the elementwise product sum
    (a, b), (c, d) = obs.matrix.tolist()
    (p, q), (r, t) = rho.matrix.tolist()
    value = a * p + b * q + c * r + d * t
    return max(-1.0, min(1.0, value))


@dataclass(frozen=True)
class DocumentState:
    """A document's amplitude pairs in each relevance-dimension basis."""

    doc_id: str
    standard_dimension: str
    amplitudes: Mapping[str, AmplitudePair] = field(default_factory=dict)

    def __post_init__(self):
        amps = dict(self.amplitudes)
        if self.standard_dimension not in amps:
            raise InputError(
                f"document {self.doc_id!r}: standard dimension "
                f"{self.standard_dimension!r} has no amplitudes"
            )
        for dim, pair in amps.items():
            if not isinstance(pair, AmplitudePair):
                raise InputError(f"document {self.doc_id!r}: bad amplitudes for {dim!r}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_probabilities(
        cls, doc_id: str, probabilities: Mapping[str, float], standard: str | None = None
    ) -> "DocumentState":
        amps = {dim: AmplitudePair.from_probability(p) for dim, p in probabilities.items()}
        return cls(doc_id, standard or next(iter(amps)), amps)

    @property
    def dimensions(self) -> tuple[str, ...]:
        return tuple(self.amplitudes)

    def pair(self, dim: str) -> AmplitudePair:
        try:
            return self.amplitudes[dim]
        except KeyError:
            raise InputError(f"document {self.doc_id!r} has no dimension {dim!r}") from None

    def with_standard(self, dim: str) -> "DocumentState":
        self.pair(dim)
        return DocumentState(self.doc_id, dim, self.amplitudes)

    def vector(self) -> np.ndarray:
        """The state in standard-basis coordinates."""
        return self.amplitudes[self.standard_dimension].as_vector()

    def basis(self, dim: str) -> tuple[np.ndarray, np.ndarray]:
        """(relevant, irrelevant) vectors of ``dim`` in standard coordinates."""
        target = self.pair(dim)
        if dim == self.standard_dimension:
            return np.array([1.0, 0.0]), np.array([0.0, 1.0])
        return basis_change(self.amplitudes[self.standard_dimension], target)

    def probability(self, dim: str, outcome: int = 1) -> float:
        """Probability of judging the document (ir)relevant along ``dim``."""
        relevant, irrelevant = self.basis(dim)
        vec = relevant if outcome == 1 else irrelevant
        return projection_probability(self.vector(), vec)

    @cached_property
    def _density(self) -> DensityMatrix:
        return DensityMatrix.from_state(self.vector())

    def density(self) -> DensityMatrix:
        return self._density

    @cached_property
    def _expectations(self) -> dict[str, float]:
        return {}


def observable_from_dimension(doc: DocumentState, dim: str) -> Observable:
    """Observable of ``dim`` in the document's standard coordinates.

    With ``(u, v)`` the relevant basis vector of ``dim`` the matrix is
    ``[[u^2 - v^2, 2uv], [2uv, v^2 - u^2]]``; the standard dimension gives
    ``diag(1, -1)``.
    """
    doc.pair(dim)
    if dim == doc.standard_dimension:
        return PAULI_Z
    std, target = doc.amplitudes[doc.standard_dimension], doc.amplitudes[dim]
    # relevant vector of basis_change, without the array round trip
    u = std.alpha * target.alpha + std.beta * target.beta
    v = std.beta * target.alpha - std.alpha * target.beta
    return Observable(np.array([[u * u - v * v, 2 * u * v], [2 * u * v, v * v - u * u]]))


def dimension_expectation(doc: DocumentState, dim: str) -> float:
    """Trace-rule expectation of the ``dim`` observable on the document."""
    cache = doc._expectations
    if dim not in cache:
        cache[dim] = expectation(observable_from_dimension(doc, dim), doc.density())
    return cache[dim]


@dataclass(frozen=True)
class OrderEffect:
    """Judging along ``dim_a`` then ``dim_b`` (forward) versus the reverse order."""

    doc_id: str
    dim_a: str
    dim_b: str
    forward: float
    reverse: float

    @property
    def ratio(self) -> float | None:
        """reverse / forward; None when the forward chain has zero probability."""
        if self.forward == 0.0:
            return 1.0 if self.reverse == 0.0 else None
        return self.reverse / self.forward


def order_effect(doc: DocumentState, dim_a: str, dim_b: str) -> OrderEffect:
    rel_a, _ = doc.basis(dim_a)
    rel_b, _ = doc.basis(dim_b)
    state = doc.vector()
    return OrderEffect(
        doc.doc_id,
        dim_a,
        dim_b,
        forward=sequential_projection(state, [rel_a, rel_b]),
        reverse=sequential_projection(state, [rel_b, rel_a]),
    )
