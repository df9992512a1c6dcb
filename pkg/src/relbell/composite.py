"""Two-document composite systems on R^2 (x) R^2.

Coefficients are ordered over the product basis |00>, |01>, |10>, |11>,
where 0 is the relevant and 1 the irrelevant vector of each factor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hilbert import NORM_TOL, STRUCT_TOL, InputError, Observable, _as_vector

RANK_TOL = 1e-9
INVARIANCE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CompositeState:
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.float64)
        if c.shape != (4,):
            raise InputError(f"composite state needs 4 coefficients, got shape {c.shape}")
        if abs(np.linalg.norm(c) - 1.0) > NORM_TOL:
            raise InputError(f"composite state is not unit-norm: {c.tolist()}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def coefficient_matrix(self) -> np.ndarray:
        """[[c00, c01], [c10, c11]]: rows index the first factor."""
        return self.coefficients.reshape(2, 2)

    def swapped(self) -> "CompositeState":
        return CompositeState(self.coefficient_matrix().T.reshape(4))


@dataclass(frozen=True, eq=False)
class CompositeObservable:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64)
        if m.shape != (4, 4) or not np.allclose(m, m.T, rtol=0, atol=STRUCT_TOL):
            raise InputError("composite observable must be a symmetric 4x4 matrix")
        if not np.allclose(m @ m, np.eye(4), rtol=0, atol=STRUCT_TOL):
            raise InputError("composite observable does not square to the identity")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def tensor_product(d1, d2) -> CompositeState:
    v1 = _as_vector(d1, "d1", tol=NORM_TOL)
    v2 = _as_vector(d2, "d2", tol=NORM_TOL)
    return CompositeState(np.kron(v1, v2))


def tensor_observable(a: Observable, b: Observable) -> CompositeObservable:
    return CompositeObservable(np.kron(a.matrix, b.matrix))


def composite_expectation(obs: CompositeObservable, psi: CompositeState) -> float:
    c = psi.coefficients
    return max(-1.0, min(1.0, float(c @ obs.matrix @ c)))


class BellKind(enum.Enum):
    PHI_PLUS = "phi_plus"


def bell_state(kind: BellKind | str = BellKind.PHI_PLUS) -> CompositeState:
    kind = BellKind(kind)
    if kind is BellKind.PHI_PLUS:
        s = 1.0 / math.sqrt(2.0)
        return CompositeState(np.array([s, 0.0, 0.0, s]))
    raise InputError(f"unsupported Bell state {kind}")


@dataclass(frozen=True)
class SchmidtDecomposition:
    singular_values: tuple[float, float]
    rank: int

    @property
    def separable(self) -> bool:
        return self.rank == 1


def schmidt_decompose(psi: CompositeState, rank_tol: float = RANK_TOL) -> SchmidtDecomposition:
    """Schmidt coefficients from the closed-form SVD of the 2x2 coefficient matrix.

    For M with Frobenius norm squared S and determinant D the singular values
    satisfy s1^2 + s2^2 = S and s1 * s2 = |D|, so
    s1 = sqrt((S + sqrt(S^2 - 4 D^2)) / 2) and s2 = |D| / s1. Taking s2 from
    the product avoids cancellation when the state is nearly separable.
    """
    (a, b), (c, d) = psi.coefficient_matrix()
    frob = a * a + b * b + c * c + d * d
    det = abs(a * d - b * c)
    disc = math.sqrt(max(frob * frob - 4.0 * det * det, 0.0))
    s1 = math.sqrt((frob + disc) / 2.0)
    s2 = det / s1 if s1 > 0.0 else 0.0
    s2 = min(s2, s1)
    rank = int(s1 > rank_tol) + int(s2 > rank_tol)
    return SchmidtDecomposition((s1, s2), rank)


def rotation_basis(theta: float) -> np.ndarray:
    """Orthonormal basis as matrix columns: (cos, sin) and (-sin, cos)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class InvarianceReport:
    invariant: bool
    coefficients: tuple[tuple[float, ...], ...]
    deviations: tuple[float, ...]


def rotational_invariance_check(
    psi: CompositeState, bases: Sequence, tol: float = INVARIANCE_TOL
) -> InvarianceReport:
    """Re-express ``psi`` in each product basis B (x) B and compare coefficients.

    Every entry of ``bases`` is a 2x2 matrix whose columns are the new basis
    vectors, written in the current coordinates.
    """
    coeffs = []
    devs = []
    for basis in bases:
        m = np.asarray(basis, dtype=np.float64)
        if m.shape != (2, 2) or not np.allclose(m.T @ m, np.eye(2), rtol=0, atol=STRUCT_TOL):
            raise InputError(f"basis is not orthonormal: {m.tolist()}")
        rotated = m.T @ psi.coefficient_matrix() @ m
        coeffs.append(tuple(float(x) for x in rotated.reshape(4)))
        devs.append(float(np.max(np.abs(rotated.reshape(4) - psi.coefficients))))
    return InvarianceReport(
        invariant=all(dv <= tol for dv in devs),
        coefficients=tuple(coeffs),
        deviations=tuple(devs),
    )
