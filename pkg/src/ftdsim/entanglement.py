"""Partial-transpose entanglement detection and the separable-interior test."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .states import DensityOperator, isotropic_mix
from .tensor_algebra import hermitian_spectrum, partial_transpose

ENT_TOL = 1e-9
INTERIOR_TOL = 1e-9

# PPT is equivalent to separability only for these local dimensions.
PPT_EXACT_DIMS = {(2, 2), (2, 3), (3, 2)}


class Classification(str, enum.Enum):
    ENTANGLED = "Entangled"
    SEPARABLE_BOUNDARY = "SeparableBoundary"
    SEPARABLE_INTERIOR = "SeparableInterior"
    # PPT in dimensions where PPT does not imply separability
    PPT_UNDECIDED = "PptUndecided"


@dataclass(frozen=True)
class EntanglementVerdict:
    lambda_minus: float
    negativity: float
    classification: Classification

    @property
    def entangled(self) -> bool:
        return self.classification is Classification.ENTANGLED

    def to_json(self) -> dict:
        return {
            "lambda_minus": self.lambda_minus,
            "negativity": self.negativity,
            "classification": self.classification.value,
        }


def pt_spectrum(rho: DensityOperator) -> np.ndarray:
    return hermitian_spectrum(partial_transpose(rho.matrix, rho.dims))


def min_pt_eigenvalue(rho: DensityOperator) -> float:
    """Smallest eigenvalue of the partial transpose (lambda_minus)."""
    return float(pt_spectrum(rho)[0])


def negativity(rho: DensityOperator) -> float:
    w = pt_spectrum(rho)
    return float(-np.sum(w[w < 0.0]))


def classify_separability(rho: DensityOperator) -> EntanglementVerdict:
    """NPT states are Entangled; PPT states are split into interior and boundary.

    A state is reported as SeparableInterior when both ``rho`` and its
    partial transpose are positive definite (every eigenvalue above
    ``INTERIOR_TOL``). For local dimensions beyond 2x3 a PPT state gets
    ``PptUndecided`` because PPT does not certify separability there.
    """
    w_pt = pt_spectrum(rho)
    lam = float(w_pt[0])
    neg = float(-np.sum(w_pt[w_pt < 0.0]))
    if lam < -ENT_TOL:
        return EntanglementVerdict(lam, neg, Classification.ENTANGLED)
    if rho.dims.as_tuple() not in PPT_EXACT_DIMS:
        return EntanglementVerdict(lam, 0.0, Classification.PPT_UNDECIDED)
    rho_min = float(hermitian_spectrum(rho.matrix)[0])
    if rho_min > INTERIOR_TOL and lam > INTERIOR_TOL:
        cls = Classification.SEPARABLE_INTERIOR
    else:
        cls = Classification.SEPARABLE_BOUNDARY
    return EntanglementVerdict(lam, 0.0, cls)


def is_entangled(rho: DensityOperator) -> bool:
    return min_pt_eigenvalue(rho) < -ENT_TOL


def entanglement_mixing_threshold(rho: DensityOperator, tol: float = 1e-13) -> float:
    """Smallest weight ``lam`` such that ``isotropic_mix(rho, lam)`` is PPT for all larger weights.

    Found by bisection on ``lambda_minus`` of the mixture, which is affine
    (hence monotone) in ``lam``. PPT inputs return 0.
    """
    if min_pt_eigenvalue(rho) >= -ENT_TOL:
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if min_pt_eigenvalue(isotropic_mix(rho, mid)) < 0.0:
            lo = mid
        else:
            hi = mid
    return hi
