"""CV-mode teleportation in the characteristic-function picture.

Conventions: ``chi(beta) = Tr[rho D(beta)]`` with
``D(beta) = exp(beta a^dag - beta* a)`` and ``beta = x + i p``. For an
operator ``M`` we write ``X_M(beta) = Tr[M D(beta)]``, so
``X_{|m><n|}(beta) = <n|D(beta)|m>``. Two-mode hybrid functions take the DV
argument first: ``chi_h(beta_D, beta_C)``.

With unit gain the teleporter multiplies the characteristic function of the
teleported mode by ``exp(-sigma |beta|^2)``, which gives the fidelity
integral

    F = (1/pi^2) int chi_h(bD, bB) chi_h(-bD, -bB) exp(-sigma |bB|^2).

The closed forms below evaluate it analytically; the quadrature oracle
evaluates it numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dv_teleport import TeleportParams, sigma_of
from .errors import DomainError, QuadratureConvergenceError, UnknownLabelError
from .fock import _cat_normalisation
from .hybrid import Variant, s_of_alpha

__all__ = [
    "PHI_OPTIMAL",
    "PhasePoint",
    "Coherent",
    "ChiEvaluator",
    "squeeze_argument",
    "chi_gaussian",
    "x_matrix_element",
    "chi_hybrid",
    "fidelity_cv_closed",
    "fidelity_cv_exact",
    "fidelity_cv_numeric_oracle",
    "large_fidelity",
    "small_fidelity",
    "exact_fidelity",
    "numeric_fidelity",
]

# TMSV phase giving the best teleportation fidelity.
PHI_OPTIMAL = math.pi


def squeeze_argument(beta, s):
    """``beta cosh s - beta* sinh s``, the argument seen through ``S(s)``."""
    beta = np.asarray(beta, dtype=complex)
    return beta * math.cosh(s) - np.conj(beta) * math.sinh(s)


@dataclass(frozen=True)
class PhasePoint:
    """Complex phase-space argument ``beta = x + i p``."""

    beta: complex

    def beta_tilde(self, s):
        return complex(squeeze_argument(self.beta, s))


@dataclass(frozen=True)
class Coherent:
    """Label for the coherent state ``|amplitude>``."""

    amplitude: complex


# ---------------------------------------------------------------------------
# Gaussian characteristic functions
# ---------------------------------------------------------------------------


def _vac(beta):
    return np.exp(-0.5 * np.abs(beta) ** 2)


def _tmsv(beta_a, beta_b, r, phi):
    ch, sh = math.cosh(r), math.sinh(r)
    ph = np.exp(1j * phi)
    first = np.abs(beta_a * ch + np.conj(beta_b) * ph * sh) ** 2
    second = np.abs(beta_b * ch + np.conj(beta_a) * ph * sh) ** 2
    return np.exp(-0.5 * (first + second))


def chi_gaussian(kind, *points, r=0.0, phi=PHI_OPTIMAL, s=0.0, T_A=1.0, T_B=1.0):
    """Characteristic function of a Gaussian state.

    ``kind`` is one of ``vacuum`` and ``smsv`` (one argument), or ``tmsv`` and
    ``tmsv_attenuated`` (two arguments). The squeezed vacuum uses ``theta = 0``;
    the attenuated TMSV has each arm mixed with vacuum at transmissivities
    ``T_A`` and ``T_B``.
    """
    pts = [np.asarray(p, dtype=complex) for p in points]
    if kind == "vacuum":
        (beta,) = pts
        return _vac(beta)
    if kind == "smsv":
        (beta,) = pts
        return _vac(squeeze_argument(beta, s))
    if kind == "tmsv":
        beta_a, beta_b = pts
        return _tmsv(beta_a, beta_b, r, phi)
    if kind == "tmsv_attenuated":
        beta_a, beta_b = pts
        return (
            _tmsv(math.sqrt(T_A) * beta_a, math.sqrt(T_B) * beta_b, r, phi)
            * _vac(-math.sqrt(1.0 - T_A) * beta_a)
            * _vac(-math.sqrt(1.0 - T_B) * beta_b)
        )
    raise UnknownLabelError(f"unknown Gaussian kind {kind!r}")


# ---------------------------------------------------------------------------
# X functions of operator elements
# ---------------------------------------------------------------------------

# |+-> = (|0> +- |1>)/sqrt(2), as coefficient vectors over (|0>, |1>)
_DV_KETS = {
    "0": np.array([1.0, 0.0]),
    "1": np.array([0.0, 1.0]),
    "+": np.array([1.0, 1.0]) / math.sqrt(2.0),
    "-": np.array([1.0, -1.0]) / math.sqrt(2.0),
}


def _fock_x(m, n, beta):
    """``<n|D(beta)|m>`` for m, n in {0, 1}."""
    g = _vac(beta)
    if m == 0 and n == 0:
        return g
    if m == 1 and n == 1:
        return g * (1.0 - np.abs(beta) ** 2)
    if m == 0 and n == 1:
        return beta * g
    return -np.conj(beta) * g


def _coherent_overlap(bra, ket):
    """``<bra|ket>`` for coherent amplitudes."""
    return np.exp(-0.5 * abs(bra) ** 2 - 0.5 * np.abs(ket) ** 2 + np.conj(bra) * ket)


def _coherent_x(ket, bra, beta):
    """``<bra|D(beta)|ket>`` using ``D(beta)|a> = exp(i Im(beta a*)) |a + beta>``."""
    phase = np.exp(1j * np.imag(beta * np.conj(ket)))
    return phase * _coherent_overlap(bra, ket + beta)


def _label(label, alpha0):
    if isinstance(label, Coherent):
        return "coh", complex(label.amplitude)
    if isinstance(label, (int, np.integer)):
        label = str(int(label))
    if label in _DV_KETS:
        return "dv", label
    if label in ("s0", "s1", "squeezed-0", "squeezed-1"):
        return "sq", label[-1]
    if label in ("alpha", "+alpha", "-alpha"):
        if alpha0 is None:
            raise UnknownLabelError(f"label {label!r} needs alpha0")
        return "coh", complex(-alpha0 if label == "-alpha" else alpha0)
    raise UnknownLabelError(f"unknown label {label!r}")


def x_matrix_element(ket, bra, beta, s=0.0, alpha0=None):
    """``X_{|ket><bra|}(beta) = <bra|D(beta)|ket>``.

    Labels:

    * ``0``, ``1``, ``"+"``, ``"-"``: photon-number qubit states;
    * ``"alpha"``, ``"-alpha"`` (with ``alpha0``) or :class:`Coherent`;
    * ``"s0"``, ``"s1"``: ``S(s)|0>`` and ``S(s)|1>``. Both labels must be
      squeezed; the element is the Fock one evaluated at ``beta~``.
    """
    kind_k, k = _label(ket, alpha0)
    kind_b, b = _label(bra, alpha0)
    beta = np.asarray(beta, dtype=complex)
    if kind_k != kind_b:
        raise UnknownLabelError(f"cannot mix labels {ket!r} and {bra!r}")
    if kind_k == "coh":
        return _coherent_x(k, b, beta)
    if kind_k == "sq":
        return _fock_x(int(k), int(b), squeeze_argument(beta, s))
    u, v = _DV_KETS[k], _DV_KETS[b]
    # |u><v| = sum_{m,n} u_m v_n |m><n|
    return sum(u[m] * v[n] * _fock_x(m, n, beta)
               for m in (0, 1) for n in (0, 1) if u[m] * v[n] != 0)


def _dv_matrix_x(mat, beta):
    """``X_M(beta)`` for a 2x2 operator M over (|0>, |1>)."""
    return sum(mat[m, n] * _fock_x(m, n, beta)
               for m in (0, 1) for n in (0, 1) if mat[m, n] != 0)


# ---------------------------------------------------------------------------
# Hybrid characteristic functions
# ---------------------------------------------------------------------------


def _ketbra(u, v):
    return np.outer(_DV_KETS[u], _DV_KETS[v])


def _cat_x(ket_sign, bra_sign, alpha0):
    """``X_{|cat_k><cat_b|}`` as a function of beta, from coherent elements."""
    n_k = _cat_normalisation(alpha0, ket_sign)
    n_b = _cat_normalisation(alpha0, bra_sign)
    pairs = [(+1, +1), (-1, -1), (+1, -1), (-1, +1)]

    def fn(beta):
        total = 0.0
        for j, l in pairs:
            # |cat_k> has coefficient ket_sign on |-alpha0>
            weight = (ket_sign if j < 0 else 1) * (bra_sign if l < 0 else 1)
            total = total + weight * _coherent_x(j * alpha0, l * alpha0, beta)
        return total / (n_k * n_b)

    return fn


def _hybrid_terms(variant, alpha0, s=None):
    """Decomposition ``chi_h(bD, bC) = sum_t X_{M_t}(bD) Y_t(bC)``.

    Returns a list of (2x2 DV operator M_t including weights, Y_t).
    """
    variant = Variant(variant)
    if variant is Variant.LARGE:
        return [
            (0.5 * _ketbra("+", "+"), lambda b: _coherent_x(alpha0, alpha0, b)),
            (0.5 * _ketbra("-", "-"), lambda b: _coherent_x(-alpha0, -alpha0, b)),
            (-0.5 * _ketbra("+", "-"), lambda b: _coherent_x(alpha0, -alpha0, b)),
            (-0.5 * _ketbra("-", "+"), lambda b: _coherent_x(-alpha0, alpha0, b)),
        ]
    if variant is Variant.SMALL:
        s = s_of_alpha(alpha0) if s is None else s
        return [
            (0.5 * _ketbra("0", "0"), lambda b: _fock_x(1, 1, squeeze_argument(b, s))),
            (0.5 * _ketbra("1", "1"), lambda b: _fock_x(0, 0, squeeze_argument(b, s))),
            (0.5 * _ketbra("0", "1"), lambda b: _fock_x(1, 0, squeeze_argument(b, s))),
            (0.5 * _ketbra("1", "0"), lambda b: _fock_x(0, 1, squeeze_argument(b, s))),
        ]
    if variant is Variant.EXACT:
        return [
            (0.5 * _ketbra("0", "0"), _cat_x(-1, -1, alpha0)),
            (0.5 * _ketbra("1", "1"), _cat_x(+1, +1, alpha0)),
            (0.5 * _ketbra("0", "1"), _cat_x(-1, +1, alpha0)),
            (0.5 * _ketbra("1", "0"), _cat_x(+1, -1, alpha0)),
        ]
    raise DomainError(f"no characteristic function for variant {variant.value!r}")


def chi_hybrid(variant, alpha0, beta_d, beta_c, s=None):
    """Characteristic function ``chi_h(beta_D, beta_C)`` of a hybrid state.

    ``variant`` is ``large``, ``small`` or ``exact``. For ``small`` the
    squeezing defaults to :func:`s_of_alpha`; ``s`` overrides it.
    """
    beta_d = np.asarray(beta_d, dtype=complex)
    beta_c = np.asarray(beta_c, dtype=complex)
    return sum(_dv_matrix_x(m, beta_d) * y(beta_c)
               for m, y in _hybrid_terms(variant, alpha0, s))


@dataclass(frozen=True)
class ChiEvaluator:
    """Callable characteristic function of a named state or operator element.

    ``kind`` is a Gaussian kind (see :func:`chi_gaussian`), a hybrid kind
    (``hybrid_large``, ``hybrid_small``, ``hybrid_exact``) or an element kind
    (``fock_element``, ``coherent_element``) whose ``params`` hold ``ket`` and
    ``bra`` labels.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __call__(self, *points):
        p = dict(self.params)
        if self.kind.startswith("hybrid_"):
            variant = self.kind.split("_", 1)[1]
            return chi_hybrid(variant, p["alpha0"], *points, s=p.get("s"))
        if self.kind in ("fock_element", "coherent_element"):
            (beta,) = points
            return x_matrix_element(p["ket"], p["bra"], beta,
                                    s=p.get("s", 0.0), alpha0=p.get("alpha0"))
        return chi_gaussian(self.kind, *points, **p)


# ---------------------------------------------------------------------------
# Fidelity: closed forms
# ---------------------------------------------------------------------------


def _sigma(params):
    if isinstance(params, TeleportParams):
        if params.g != 1.0:
            raise DomainError(f"CV-mode teleportation assumes unit gain, got g={params.g}")
        return sigma_of(params)
    sigma = float(params)
    if sigma < 0:
        raise DomainError(f"sigma must be >= 0, got {sigma!r}")
    return sigma


def large_fidelity(alpha0, sigma):
    """``[1 + exp(-4 a^2 sigma / (1 + sigma))] / (2 (1 + sigma))``."""
    return (1.0 + math.exp(-4.0 * alpha0**2 * sigma / (1.0 + sigma))) / (2.0 * (1.0 + sigma))


def small_fidelity(sigma, s):
    """``(f00 + f11 + f10 + f01) / 4`` for the squeezed-Fock hybrid state."""
    c2, c4 = math.cosh(2 * s), math.cosh(4 * s)
    tau = 1.0 + sigma**2 + 2.0 * sigma * c2
    em, ep = math.exp(-2 * s) + sigma, math.exp(2 * s) + sigma
    f00 = 1.0 / math.sqrt(tau)
    f11 = (2.0 + sigma**2 + 2.0 * sigma**4 + 4.0 * sigma * (1.0 + sigma**2) * c2
           + 3.0 * sigma**2 * c4) / (2.0 * math.sqrt(em) * ep**2.5 * em**2)
    f10 = (1.0 + sigma * c2) / tau**1.5
    return (f00 + f11 + 2.0 * f10) / 4.0


def exact_fidelity(alpha0, sigma, exponent="quadratic"):
    """Teleportation fidelity of the exact cat hybrid state.

    Built from the five Gaussian overlap integrals ``f0 .. f4``. With
    ``exponent="quadratic"`` their exponents scale with ``alpha0**2``;
    ``"linear"`` substitutes ``alpha0`` instead, kept only so the two
    readings can be compared against the quadrature oracle.
    """
    if exponent == "quadratic":
        a = alpha0**2
    elif exponent == "linear":
        a = alpha0
    else:
        raise ValueError(f"exponent must be 'quadratic' or 'linear', got {exponent!r}")
    f0 = 1.0 / (1.0 + sigma)
    # With e1..e4 the exponentials in f1..f4 (f_i = f0 e_i) and
    # x = 2 a (1 - sigma)/(1 + sigma), the three combinations regroup into
    # forms free of cancellation at small alpha0:
    #   1 + e1 + e2 + e3 + 4 e4 = (1 + e4)^2 + 4 e4 cosh^2(x/2)
    #   1 + e1 + e2 + e3 - 4 e4 = (1 - e4)^2 + 4 e4 sinh^2(x/2)
    #   1 + e1 - e2 - e3       = (1 - e3) + 2 e4 sinh(x)
    e4 = math.exp(-2.0 * a)
    x = 2.0 * a * (1.0 - sigma) / (1.0 + sigma)
    even = (1.0 + e4) ** 2 + 4.0 * e4 * math.cosh(0.5 * x) ** 2
    odd = math.expm1(-2.0 * a) ** 2 + 4.0 * e4 * math.sinh(0.5 * x) ** 2
    cross = -math.expm1(-4.0 * a) + 2.0 * e4 * math.sinh(x)
    np2 = _cat_normalisation(alpha0, +1) ** 2
    nm2 = _cat_normalisation(alpha0, -1) ** 2
    f_pp = 2.0 * f0 * even / np2**2
    f_mm = 2.0 * f0 * odd / nm2**2
    f_pm = 2.0 * f0 * cross / (np2 * nm2)
    return (f_pp + f_mm + 2.0 * f_pm) / 4.0


def fidelity_cv_closed(variant, alpha0, params, s=None):
    """Closed-form CV-teleportation fidelity for the ``large`` or ``small`` form.

    ``params`` is a unit-gain :class:`TeleportParams` or a noise value
    ``sigma``. For ``small``, ``s`` overrides the squeezing derived from
    ``alpha0``.
    """
    sigma = _sigma(params)
    variant = Variant(variant)
    if variant is Variant.LARGE:
        return large_fidelity(alpha0, sigma)
    if variant is Variant.SMALL:
        return small_fidelity(sigma, s_of_alpha(alpha0) if s is None else s)
    raise DomainError(f"no closed form for variant {variant.value!r}; use fidelity_cv_exact")


def fidelity_cv_exact(alpha0, params, exponent="quadratic"):
    """Closed-form CV-teleportation fidelity of the exact cat hybrid state."""
    if not alpha0 > 0:
        raise DomainError(f"alpha0 must be > 0, got {alpha0!r}")
    return exact_fidelity(alpha0, _sigma(params), exponent)


# ---------------------------------------------------------------------------
# Fidelity: quadrature oracle
# ---------------------------------------------------------------------------


def _envelope(variant, sigma, s):
    """Per-axis Gaussian decay rates (x, p) of the teleported-mode integrand."""
    if Variant(variant) is Variant.SMALL:
        return math.exp(-2 * s) + sigma, math.exp(2 * s) + sigma
    return 1.0 + sigma, 1.0 + sigma


def _gh_grid(order, cx, cp):
    """Product Gauss-Hermite nodes for ``int dx dp`` with envelope exp(-cx x^2 - cp p^2).

    Returns (beta, weight) where weight already divides out the envelope.
    """
    y, w = np.polynomial.hermite.hermgauss(order)
    w_full = w * np.exp(y**2)
    x, wx = y / math.sqrt(cx), w_full / math.sqrt(cx)
    p, wp = y / math.sqrt(cp), w_full / math.sqrt(cp)
    beta = x[:, None] + 1j * p[None, :]
    return beta, wx[:, None] * wp[None, :]


def _reduced_integral(terms, sigma, beta, weight):
    """Sum over term pairs of Tr[M_t M_u] (1/pi) int Y_t(b) Y_u(-b) e^{-sigma|b|^2}."""
    damping = np.exp(-sigma * np.abs(beta) ** 2)
    plus = [y(beta) for _, y in terms]
    minus = [y(-beta) for _, y in terms]
    total = 0.0
    for t, (m_t, _) in enumerate(terms):
        for u, (m_u, _) in enumerate(terms):
            dv = np.trace(m_t @ m_u)
            if dv == 0:
                continue
            integral = np.sum(weight * plus[t] * minus[u] * damping) / math.pi
            total += dv * integral
    return total


def _full_integral(terms, sigma, beta, weight, d_order):
    """Four-dimensional quadrature with the DV-mode integrals done numerically."""
    beta_d, weight_d = _gh_grid(d_order, 1.0, 1.0)
    damping = np.exp(-sigma * np.abs(beta) ** 2)
    plus_c = [y(beta) for _, y in terms]
    minus_c = [y(-beta) for _, y in terms]
    total = 0.0
    for bd, wd in zip(beta_d.ravel(), weight_d.ravel()):
        chi_p = sum(_dv_matrix_x(m, bd) * pc for (m, _), pc in zip(terms, plus_c))
        chi_m = sum(_dv_matrix_x(m, -bd) * mc for (m, _), mc in zip(terms, minus_c))
        total += wd * np.sum(weight * chi_p * chi_m * damping)
    return total / math.pi**2


def numeric_fidelity(variant, alpha0, sigma, s=None, full=False,
                     orders=(20, 40, 80, 160), tol=1e-7, d_order=12):
    """Quadrature of the CV-teleportation fidelity integral.

    By default the DV-mode integrals are reduced analytically to
    ``pi Tr[M_t M_u]`` and only the two real dimensions of the teleported
    mode are integrated; ``full=True`` integrates all four dimensions.
    The Gauss-Hermite order escalates through ``orders`` until two
    successive results agree within ``tol``.
    """
    variant = Variant(variant)
    if variant is Variant.SMALL and s is None:
        s = s_of_alpha(alpha0)
    terms = _hybrid_terms(variant, alpha0, s)
    cx, cp = _envelope(variant, sigma, s or 0.0)
    previous = None
    for order in orders:
        beta, weight = _gh_grid(order, cx, cp)
        if full:
            value = _full_integral(terms, sigma, beta, weight, d_order)
        else:
            value = _reduced_integral(terms, sigma, beta, weight)
        value = float(np.real(value))
        if previous is not None and abs(value - previous) <= tol:
            return value
        previous = value
    raise QuadratureConvergenceError(
        f"quadrature did not converge to {tol:.1g} within orders {tuple(orders)}"
    )


def fidelity_cv_numeric_oracle(variant, alpha0, params, s=None, full=False):
    """Quadrature oracle for the CV-teleportation fidelity (unit gain)."""
    return numeric_fidelity(variant, alpha0, _sigma(params), s=s, full=full)
