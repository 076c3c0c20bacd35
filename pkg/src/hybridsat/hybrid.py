"""Hybrid cat/photon-number entangled states and their approximations.

Mode order is always (CV mode, DV mode); the DV mode has two levels. The
exact state is ``(|cat_-> |0> + |cat_+> |1>) / sqrt(2)`` with real ``alpha0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .fock import (
    DEFAULT_POLICY,
    StateVector,
    _cat_normalisation,
    cat_ket,
    coherent_ket,
    squeezed_fock_ket,
)

__all__ = [
    "Variant",
    "RegimeWarning",
    "HybridSpec",
    "s_of_alpha",
    "hybrid_exact",
    "hybrid_large",
    "hybrid_small",
    "hybrid_coherent",
    "hybrid_state",
]


class Variant(str, Enum):
    EXACT = "exact"
    LARGE = "large"
    SMALL = "small"
    COHERENT = "coherent"


class RegimeWarning(UserWarning):
    """An approximation is being used outside the amplitude range it targets."""


def s_of_alpha(alpha0):
    """Squeezing that best matches ``S(s)|1>`` to the odd cat of amplitude alpha0.

    ``s = (sqrt(9 + 4 alpha0^4) - 3) / (2 alpha0^2)``.
    """
    if alpha0 <= 0:
        raise DomainError(f"alpha0 must be > 0, got {alpha0!r}")
    a2 = alpha0 * alpha0
    # Rationalised form avoids cancellation for small alpha0.
    return 2.0 * a2 / (math.sqrt(9.0 + 4.0 * a2 * a2) + 3.0)


@dataclass(frozen=True)
class HybridSpec:
    """Parameters of a hybrid entangled state.

    ``s``, ``N_plus`` and ``N_minus`` are derived from ``alpha0``.
    Constructing a ``large`` spec with ``alpha0 <= 1`` or a ``small`` spec with
    ``alpha0 >= 0.5`` emits a :class:`RegimeWarning`.
    """

    alpha0: float
    variant: Variant = Variant.EXACT

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not self.alpha0 > 0:
            raise DomainError(f"alpha0 must be > 0, got {self.alpha0!r}")
        if self.variant is Variant.LARGE and self.alpha0 <= 1:
            warnings.warn(
                f"large-cat approximation used at alpha0={self.alpha0} <= 1",
                RegimeWarning, stacklevel=3,
            )
        if self.variant is Variant.SMALL and self.alpha0 >= 0.5:
            warnings.warn(
                f"small-cat approximation used at alpha0={self.alpha0} >= 0.5",
                RegimeWarning, stacklevel=3,
            )

    @property
    def s(self):
        return s_of_alpha(self.alpha0)

    @property
    def N_plus(self):
        return _cat_normalisation(self.alpha0, +1)

    @property
    def N_minus(self):
        return _cat_normalisation(self.alpha0, -1)


def _require(spec, variant):
    if spec.variant is not variant:
        raise DomainError(f"expected a {variant.value} spec, got {spec.variant.value}")


def _pair(cv_for_0, cv_for_1, sign=1.0):
    """(|u>|0> + sign |v>|1>)/sqrt(2) over (CV, DV)."""
    amps = np.kron(cv_for_0.amplitudes, [1.0, 0.0]) + sign * np.kron(cv_for_1.amplitudes, [0.0, 1.0])
    return amps / math.sqrt(2.0)


def hybrid_exact(spec, policy=DEFAULT_POLICY):
    """``(|cat_->|0> + |cat_+>|1>)/sqrt(2)``."""
    _require(spec, Variant.EXACT)
    minus = cat_ket(spec.alpha0, -1, policy)
    plus = cat_ket(spec.alpha0, +1, policy)
    return StateVector.normalized(_pair(minus, plus), (policy.dim, 2),
                                  max(minus.defect, plus.defect))


def hybrid_large(spec, policy=DEFAULT_POLICY):
    """Large-cat form ``(|a0>|+> - |-a0>|->)/sqrt(2)``, ``|pm> = (|0> pm |1>)/sqrt(2)``.

    The two branches are orthogonal through the DV mode, so the untruncated
    norm is exactly one; the result is renormalised after truncation and
    ``defect`` records the loss.
    """
    _require(spec, Variant.LARGE)
    pos = coherent_ket(spec.alpha0, policy)
    neg = coherent_ket(-spec.alpha0, policy)
    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    minus = np.array([1.0, -1.0]) / math.sqrt(2.0)
    amps = (np.kron(pos.amplitudes, plus) - np.kron(neg.amplitudes, minus)) / math.sqrt(2.0)
    return StateVector.normalized(amps, (policy.dim, 2), max(pos.defect, neg.defect))


def hybrid_small(spec, policy=DEFAULT_POLICY, s=None):
    """Small-cat form ``(S(s)|1>|0> + S(s)|0>|1>)/sqrt(2)``.

    ``s`` defaults to :func:`s_of_alpha` of the spec amplitude; passing it
    explicitly (e.g. ``s=0``) overrides the derived value.
    """
    _require(spec, Variant.SMALL)
    s = spec.s if s is None else s
    one = squeezed_fock_ket(s, 1, policy)
    zero = squeezed_fock_ket(s, 0, policy)
    return StateVector.normalized(_pair(one, zero), (policy.dim, 2),
                                  max(one.defect, zero.defect))


def hybrid_coherent(alpha0, policy=DEFAULT_POLICY):
    """Hybrid coherent state ``(|a0>|0> + |-a0>|1>)/sqrt(2)``."""
    if not alpha0 > 0:
        raise DomainError(f"alpha0 must be > 0, got {alpha0!r}")
    pos = coherent_ket(alpha0, policy)
    neg = coherent_ket(-alpha0, policy)
    return StateVector.normalized(_pair(pos, neg), (policy.dim, 2),
                                  max(pos.defect, neg.defect))


def hybrid_state(spec, policy=DEFAULT_POLICY):
    """Dispatch on ``spec.variant``."""
    if spec.variant is Variant.EXACT:
        return hybrid_exact(spec, policy)
    if spec.variant is Variant.LARGE:
        return hybrid_large(spec, policy)
    if spec.variant is Variant.SMALL:
        return hybrid_small(spec, policy)
    return hybrid_coherent(spec.alpha0, policy)
