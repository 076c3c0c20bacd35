"""Direct satellite distribution of a hybrid state through two lossy links.

The CV mode ``A`` crosses a link of transmissivity ``T_A`` and the DV mode
``B`` a link of transmissivity ``T_B``; each link is a beam splitter with a
vacuum environment. :func:`direct_state_analytic` assembles the closed-form
output from coherent projectors; :func:`direct_state_oracle` simulates the
four-mode beam-splitter network and traces out the environments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fock import (
    DEFAULT_POLICY,
    DensityMatrix,
    StateVector,
    _cat_normalisation,
    beam_splitter_apply,
    coherent_ket,
    log_negativity,
    uhlmann_fidelity,
)
from .hybrid import HybridSpec, Variant, hybrid_state

__all__ = [
    "ChannelPair",
    "DirectCoefficients",
    "direct_state_analytic",
    "direct_state_oracle",
    "direct_metrics",
]


def _db(T):
    return math.inf if T == 0 else -10.0 * math.log10(T)


@dataclass(frozen=True)
class ChannelPair:
    """Transmissivities of the CV-mode link (``T_A``) and DV-mode link (``T_B``)."""

    T_A: float
    T_B: float

    def __post_init__(self):
        for name in ("T_A", "T_B"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value!r}")

    @classmethod
    def symmetric(cls, T):
        return cls(T, T)

    @classmethod
    def from_total_loss_db(cls, loss_db):
        """Symmetric pair whose combined loss ``-10 log10(T_A T_B)`` is ``loss_db``."""
        if loss_db < 0:
            raise DomainError(f"loss must be >= 0 dB, got {loss_db!r}")
        T = 10.0 ** (-loss_db / 20.0)
        return cls(T, T)

    @property
    def loss_db_A(self):
        return _db(self.T_A)

    @property
    def loss_db_B(self):
        return _db(self.T_B)

    @property
    def total_loss_db(self):
        return _db(self.T_A * self.T_B)


@dataclass(frozen=True)
class DirectCoefficients:
    """DV-mode weights of the directly distributed state."""

    a1: float
    a2: float
    a3: float
    a4: float

    @classmethod
    def from_params(cls, alpha0, T_B):
        n_plus = _cat_normalisation(alpha0, +1)
        n_minus = _cat_normalisation(alpha0, -1)
        return cls(
            a1=(1.0 - T_B) / n_plus**2,
            a2=1.0 / n_minus**2,
            a3=T_B / n_plus**2,
            a4=math.sqrt(T_B) / (n_plus * n_minus),
        )


def direct_state_analytic(alpha0, ch, policy=DEFAULT_POLICY):
    """Closed-form two-mode state (A', B') after both lossy links.

    Built from coherent projectors at ``+-sqrt(T_A) alpha0``; the cross
    projectors carry the explicit coherence factor
    ``exp(-2 (1 - T_A) alpha0^2)``. The DV mode is ordered ``(|0>, |1>)``.
    """
    if not alpha0 > 0:
        raise DomainError(f"alpha0 must be > 0, got {alpha0!r}")
    c = DirectCoefficients.from_params(alpha0, ch.T_B)
    amp = math.sqrt(ch.T_A) * alpha0
    pos = coherent_ket(amp, policy).amplitudes
    neg = coherent_ket(-amp, policy).amplitudes
    damp = math.exp(-2.0 * (1.0 - ch.T_A) * alpha0**2)

    def block(d00, d01, d10):
        # rows/cols (|0>, |1>) of the DV mode; d01 multiplies |0><1|
        return np.array([[d00, d01], [d10, c.a3]])

    terms = (
        (np.outer(pos, pos.conj()), block(c.a1 + c.a2, c.a4, c.a4)),
        (np.outer(neg, neg.conj()), block(c.a1 + c.a2, -c.a4, -c.a4)),
        (damp * np.outer(pos, neg.conj()), block(c.a1 - c.a2, c.a4, -c.a4)),
        (damp * np.outer(neg, pos.conj()), block(c.a1 - c.a2, -c.a4, c.a4)),
    )
    rho = 0.5 * sum(np.kron(cv, dv) for cv, dv in terms)
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho, (policy.dim, 2))


def direct_state_oracle(state, ch, policy=DEFAULT_POLICY):
    """Brute-force channel: beam splitters with vacuum ancillas, then trace.

    ``state`` is any two-mode pure state laid out as (CV, DV). The four-mode
    vector is ordered (A, eps_A, B, eps_B); environments are contracted
    straight from the pure vector, so the four-mode density matrix is never
    formed.
    """
    if state.n_modes != 2:
        raise DomainError("direct_state_oracle expects a two-mode state")
    d_cv, d_dv = state.layout
    psi = state.tensor()
    big = np.zeros((d_cv, d_cv, d_dv, d_dv), dtype=complex)
    big[:, 0, :, 0] = psi
    four = StateVector(big.reshape(-1), (d_cv, d_cv, d_dv, d_dv))
    four = beam_splitter_apply(four, (0, 1), ch.T_A)
    four = beam_splitter_apply(four, (2, 3), ch.T_B)
    t = four.tensor()
    rho = np.einsum("aebf,cedf->abcd", t, t.conj()).reshape(d_cv * d_dv, d_cv * d_dv)
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho, (d_cv, d_dv))


def direct_metrics(alpha0, ch, policy=DEFAULT_POLICY, variant=Variant.EXACT):
    """Fidelity with the undistributed state and log-negativity across A'|B'.

    The exact cat state uses the closed form; other variants (notably the
    hybrid coherent state) go through :func:`direct_state_oracle`.
    """
    variant = Variant(variant)
    reference = hybrid_state(HybridSpec(alpha0, variant), policy)
    if variant is Variant.EXACT:
        rho = direct_state_analytic(alpha0, ch, policy)
    else:
        rho = direct_state_oracle(reference, ch, policy)
    fidelity = uhlmann_fidelity(reference.to_density(), rho, policy)
    return fidelity, log_negativity(rho)
