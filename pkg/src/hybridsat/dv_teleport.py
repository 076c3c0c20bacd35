"""Teleportation of the DV mode through an attenuated TMSV channel.

The ensemble-averaged teleporter acts on the DV mode as a Gaussian channel
with gain ``g`` and added noise ``sigma``. Its action on the Fock operators
``|0><0|``, ``|1><1|`` and ``|1><0|`` is given by closed-form transfer
coefficients, so the output is assembled directly in the orthonormal
logical basis ``(|cat_+>, |cat_->)`` of the CV mode times a truncated Fock
space for the received mode B''.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .direct import ChannelPair
from .errors import DomainError, TruncationError
from .fock import DensityMatrix, StateVector, log_negativity, uhlmann_fidelity

__all__ = [
    "TeleportParams",
    "FockTruncation",
    "sigma_of",
    "tuned_gain",
    "transfer_00",
    "transfer_11",
    "transfer_10",
    "transfer_coefficients",
    "teleport_dv_state",
    "trace_defect",
    "choose_kmax",
    "dv_metrics",
    "reference_state",
]

CAT_PLUS, CAT_MINUS = 0, 1


def _scaled_square(log_scale, value):
    """``exp(log_scale) * value**2`` with 0 * inf treated as 0."""
    if value == 0.0:
        return 0.0
    return math.exp(log_scale) * value * value


@dataclass(frozen=True)
class TeleportParams:
    """Gain ``g``, TMSV squeezing ``r`` and the two down-link transmissivities.

    ``r`` may be ``math.inf`` for an ideal resource.
    """

    g: float
    r: float
    ch: ChannelPair

    def __post_init__(self):
        if not self.g > 0:
            raise DomainError(f"gain must be > 0, got {self.g!r}")
        if not self.r >= 0:
            raise DomainError(f"r must be >= 0, got {self.r!r}")

    @classmethod
    def symmetric(cls, T, r, g=1.0):
        return cls(g, r, ChannelPair(T, T))

    @property
    def sigma(self):
        return sigma_of(self)

    @property
    def gamma(self):
        return self.g**2 * (2.0 * self.sigma + 1.0)


@dataclass(frozen=True)
class FockTruncation:
    """Cut-off ``k_max`` for the teleported Fock sum and trace tolerance ``delta``."""

    k_max: int = 30
    delta: float = 1e-14

    def __post_init__(self):
        if int(self.k_max) != self.k_max or self.k_max < 0:
            raise DomainError(f"k_max must be a non-negative integer, got {self.k_max!r}")
        if not self.delta > 0:
            raise DomainError(f"delta must be > 0, got {self.delta!r}")


def sigma_of(params):
    """Added-noise variance of the attenuated TMSV teleporter.

    ``sigma = [e^{2r}(g tA - tB)^2 + e^{-2r}(g tA + tB)^2
    + 2 g^2 (1 - T_A) + 2 (1 - T_B)] / (4 g^2)`` with ``t = sqrt(T)``.
    """
    g, r = params.g, params.r
    ta, tb = math.sqrt(params.ch.T_A), math.sqrt(params.ch.T_B)
    total = (
        _scaled_square(2.0 * r, g * ta - tb)
        + _scaled_square(-2.0 * r, g * ta + tb)
        + 2.0 * g * g * (1.0 - params.ch.T_A)
        + 2.0 * (1.0 - params.ch.T_B)
    )
    return total / (4.0 * g * g)


def tuned_gain(ch):
    """Gain ``sqrt(T_B / T_A)`` that compensates asymmetric link loss."""
    if ch.T_A == 0:
        raise DomainError("tuned gain is undefined for T_A = 0")
    return math.sqrt(ch.T_B / ch.T_A)


def _power(base, k):
    # 0**0 is taken as 1 so the ideal channel (gamma = 1) stays finite.
    return 1.0 if k == 0 else base**k


# The transfer coefficients are written with q = (gamma - 1)/(gamma + 1) so
# that (gamma - 1)^k / (gamma + 1)^k never overflows for large k.


def transfer_00(k, gamma):
    """``T_{0,0 -> k,k} = 2 (gamma-1)^k / (gamma+1)^(k+1)``."""
    if k < 0:
        return 0.0
    q = (gamma - 1.0) / (gamma + 1.0)
    return 2.0 * _power(q, k) / (gamma + 1.0)


def transfer_11(k, gamma, g):
    """``T_{1,1 -> k,k}``: population of ``|k>`` after teleporting ``|1><1|``.

    ``2 [(gamma - 2g^2 + 1)(gamma-1)^k + 4 k g^2 (gamma-1)^(k-1)] / (gamma+1)^(k+2)``.
    """
    if k < 0:
        return 0.0
    q = (gamma - 1.0) / (gamma + 1.0)
    value = (gamma - 2.0 * g * g + 1.0) * _power(q, k) / (gamma + 1.0) ** 2
    if k >= 1:
        value += 4.0 * k * g * g * _power(q, k - 1) / (gamma + 1.0) ** 3
    return 2.0 * value


def transfer_10(k, gamma, g):
    """``T_{1,0 -> k+1,k} = 4 g sqrt(k+1) (gamma-1)^k / (gamma+1)^(k+2)``."""
    if k < 0:
        return 0.0
    q = (gamma - 1.0) / (gamma + 1.0)
    return 4.0 * g * math.sqrt(k + 1.0) * _power(q, k) / (gamma + 1.0) ** 2


def transfer_coefficients(k, params):
    """Block weights ``(a_k, b_k, c_k)`` of the teleported state for ``k >= -1``."""
    if k < -1:
        raise DomainError(f"k must be >= -1, got {k!r}")
    gamma, g = params.gamma, params.g
    return (
        0.5 * transfer_11(k, gamma, g),
        0.5 * transfer_10(k, gamma, g),
        0.5 * transfer_00(k + 1, gamma),
    )


def _populations(params, k_max):
    ks = range(-1, k_max + 1)
    return [transfer_coefficients(k, params) for k in ks]


def trace_defect(params, k_max):
    """``1 - sum_{k=-1}^{k_max} (a_k + c_k)``, summed exactly with ``math.fsum``."""
    coeffs = _populations(params, k_max)
    return 1.0 - math.fsum([a for a, _, _ in coeffs] + [c for _, _, c in coeffs])


def teleport_dv_state(params, trunc=FockTruncation()):
    """Teleported hybrid state on (logical cat mode, B'').

    Layout ``(2, k_max + 2)``; logical index 0 is ``|cat_+>`` and 1 is
    ``|cat_->``. The truncated sum is not renormalised.

    Raises
    ------
    TruncationError
        If the truncated trace differs from one by more than ``trunc.delta``.
    """
    k_max = trunc.k_max
    dim = k_max + 2
    rho = np.zeros((2, dim, 2, dim))
    for k, (a, b, c) in zip(range(-1, k_max + 1), _populations(params, k_max)):
        if k >= 0:
            rho[CAT_PLUS, k, CAT_PLUS, k] += a
            rho[CAT_MINUS, k, CAT_PLUS, k + 1] += b
            rho[CAT_PLUS, k + 1, CAT_MINUS, k] += b
        rho[CAT_MINUS, k + 1, CAT_MINUS, k + 1] += c
    defect = trace_defect(params, k_max)
    if abs(defect) > trunc.delta:
        raise TruncationError(
            f"trace defect {defect:.3g} exceeds delta={trunc.delta:.3g} at k_max={k_max}"
        )
    return DensityMatrix(rho.reshape(2 * dim, 2 * dim), (2, dim))


def choose_kmax(params, delta=1e-14, alpha0=None, limit=5000):
    """Smallest ``k_max`` whose trace defect is below ``delta``.

    The search starts at ``max(30, ceil(alpha0^2) + 20)``, doubles until the
    defect is below ``delta``, then narrows down to the smallest such cut-off.
    The defect is non-increasing in ``k_max``, so bisection gives the same
    answer as stepping down one at a time.
    """
    if not delta > 0:
        raise DomainError(f"delta must be > 0, got {delta!r}")
    start = 30 if alpha0 is None else max(30, math.ceil(alpha0**2) + 20)
    good = start
    bad = -1
    while trace_defect(params, good) >= delta:
        if good >= limit:
            raise TruncationError(f"no k_max <= {limit} reaches delta={delta:.3g}")
        bad, good = good, min(2 * good, limit)
    while good - bad > 1:
        mid = (good + bad) // 2
        if trace_defect(params, mid) < delta:
            good = mid
        else:
            bad = mid
    return good


def reference_state(dim):
    """``(|cat_->|0> + |cat_+>|1>)/sqrt(2)`` in the logical-cat x Fock basis."""
    amps = np.zeros((2, dim))
    amps[CAT_MINUS, 0] = amps[CAT_PLUS, 1] = 1.0 / math.sqrt(2.0)
    return StateVector(amps.reshape(-1), (2, dim))


def dv_metrics(alpha0, params, trunc=None):
    """Fidelity and log-negativity (C | B'') of the DV-teleported hybrid state.

    ``alpha0`` only sets the starting point of the automatic ``k_max`` search
    when ``trunc`` is None; the logical cat basis is orthonormal, so nothing
    else depends on it.
    """
    if not alpha0 > 0:
        raise DomainError(f"alpha0 must be > 0, got {alpha0!r}")
    if trunc is None:
        trunc = FockTruncation(choose_kmax(params, alpha0=alpha0))
    rho = teleport_dv_state(params, trunc)
    ref = reference_state(trunc.k_max + 2).to_density()
    return uhlmann_fidelity(ref, rho), log_negativity(rho)
