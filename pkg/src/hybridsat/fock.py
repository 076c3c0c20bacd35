"""Truncated Fock-space states, channels and metrics.

Every continuous-variable mode is cut off at ``dim`` photon-number levels.
Discrete-variable modes are ordinary two-level Fock spaces (``dim == 2``).
Multi-mode objects store a ``layout`` tuple of per-mode dimensions and use
row-major (``np.kron``) ordering, so mode 0 is the slowest-varying index.

Phase-space convention: hbar = 1/2, ``x = (a + a^dag)/2``,
``p = i(a^dag - a)/2`` and ``beta = x + i p``.

Beam splitter convention (transmissivity ``T``, ``t = sqrt(T)``,
``r = sqrt(1 - T)``), for a signal mode ``i`` mixed with mode ``j``::

    a_i^dag -> t a_i^dag + r a_j^dag
    a_j^dag -> t a_j^dag - r a_i^dag

so a coherent pair ``|alpha>|0>`` leaves as ``|t alpha>|r alpha>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
from scipy.special import gammaln

from .errors import (
    DegenerateCatError,
    DomainError,
    KindMismatchError,
    LayoutMismatchError,
    NonPhysicalStateError,
    TruncationError,
)

__all__ = [
    "QuadratureConvention",
    "QUADRATURE",
    "TruncationPolicy",
    "DEFAULT_POLICY",
    "StateVector",
    "DensityMatrix",
    "annihilation",
    "displacement",
    "coherent_ket",
    "cat_ket",
    "squeezed_fock_ket",
    "tmsv_ket",
    "fock_ket",
    "tensor_product",
    "partial_trace",
    "partial_transpose",
    "uhlmann_fidelity",
    "trace_distance",
    "log_negativity",
    "beam_splitter_apply",
]

_NORM_ATOL = 1e-12
_HERM_ATOL = 1e-12
_TRACE_ATOL = 1e-10


@dataclass(frozen=True)
class QuadratureConvention:
    """Quadrature operators with hbar fixed to 1/2.

    The vacuum then has ``Var(x) = Var(p) = 1/4``.
    """

    hbar: float = 0.5

    def x_operator(self, dim):
        a = annihilation(dim)
        return (a + a.conj().T) / 2

    def p_operator(self, dim):
        a = annihilation(dim)
        return 1j * (a.conj().T - a) / 2


QUADRATURE = QuadratureConvention()


@dataclass(frozen=True)
class TruncationPolicy:
    """Truncation settings for continuous-variable modes.

    Parameters
    ----------
    dim : int
        Fock levels kept per CV mode.
    norm_tol : float
        Largest acceptable norm lost to truncation before renormalising.
    psd_tol : float
        Largest negative eigenvalue magnitude tolerated in a density matrix.
    """

    dim: int = 40
    norm_tol: float = 1e-12
    psd_tol: float = 1e-9

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise DomainError(f"dim must be an integer >= 2, got {self.dim!r}")
        if not 0 < self.norm_tol <= 1e-6:
            raise DomainError(f"norm_tol must lie in (0, 1e-6], got {self.norm_tol!r}")
        if self.psd_tol < 0:
            raise DomainError(f"psd_tol must be >= 0, got {self.psd_tol!r}")


DEFAULT_POLICY = TruncationPolicy()


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def _check_layout(layout):
    layout = tuple(int(d) for d in layout)
    if not layout or any(d < 1 for d in layout):
        raise ValueError(f"invalid layout {layout!r}")
    return layout


@dataclass(frozen=True)
class StateVector:
    """Normalised pure state over one or more modes.

    ``defect`` records the norm that truncation removed before the
    constructor renormalised (zero when nothing was lost).
    """

    amplitudes: np.ndarray
    layout: tuple
    defect: float = 0.0

    def __post_init__(self):
        layout = _check_layout(self.layout)
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.size != math.prod(layout):
            raise LayoutMismatchError(
                f"{amps.size} amplitudes do not fit layout {layout}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > _NORM_ATOL:
            raise ValueError(f"state vector norm {norm!r} differs from 1")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "layout", layout)

    @classmethod
    def normalized(cls, amplitudes, layout, defect=0.0):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalise the zero vector")
        return cls(amps / norm, layout, defect)

    @property
    def n_modes(self):
        return len(self.layout)

    def tensor(self):
        """Amplitudes reshaped to one axis per mode."""
        return self.amplitudes.reshape(self.layout)

    def to_density(self):
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.layout)

    def overlap(self, other):
        """Inner product <self|other>."""
        if self.layout != other.layout:
            raise LayoutMismatchError(f"{self.layout} vs {other.layout}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state: Hermitian, unit-trace matrix with a mode layout.

    Positivity is checked on demand by :meth:`check_physical`, since the
    tolerance belongs to the caller's :class:`TruncationPolicy`.
    """

    entries: np.ndarray
    layout: tuple

    def __post_init__(self):
        layout = _check_layout(self.layout)
        rho = _frozen(self.entries)
        n = math.prod(layout)
        if rho.shape != (n, n):
            raise LayoutMismatchError(f"matrix of shape {rho.shape} does not fit layout {layout}")
        herm_err = np.max(np.abs(rho - rho.conj().T)) if n else 0.0
        if herm_err > _HERM_ATOL:
            raise ValueError(f"density matrix is not Hermitian (max deviation {herm_err:.3g})")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > _TRACE_ATOL:
            raise ValueError(f"density matrix trace {tr!r} differs from 1")
        object.__setattr__(self, "entries", rho)
        object.__setattr__(self, "layout", layout)

    @property
    def n_modes(self):
        return len(self.layout)

    @property
    def trace(self):
        return float(np.trace(self.entries).real)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.entries)

    def check_physical(self, psd_tol=DEFAULT_POLICY.psd_tol):
        """Raise NonPhysicalStateError if an eigenvalue is below ``-psd_tol``."""
        low = self.eigenvalues()[0]
        if low < -psd_tol:
            raise NonPhysicalStateError(
                f"smallest eigenvalue {low:.3g} is below -psd_tol={psd_tol:.3g}"
            )
        return self


# ---------------------------------------------------------------------------
# Operators and kets
# ---------------------------------------------------------------------------


def annihilation(dim):
    """Truncated annihilation operator ``a`` as a dense ``dim x dim`` matrix."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def displacement(beta, dim, pad=None):
    """Truncated displacement operator ``D(beta) = exp(beta a^dag - beta* a)``.

    The exponential is taken in a padded space and then cut back to ``dim``
    so that low-lying matrix elements are free of edge effects.
    """
    big = dim + (pad if pad is not None else max(40, int(8 * abs(beta) ** 2) + 20))
    a = annihilation(big)
    gen = beta * a.conj().T - np.conj(beta) * a
    return la.expm(gen)[:dim, :dim]


def _series_amplitudes(alpha, size):
    """Coherent-state coefficients ``exp(-|a|^2/2) a^n / sqrt(n!)`` for n < size."""
    n = np.arange(size)
    if alpha == 0:
        return (n == 0).astype(complex)
    mag = abs(alpha)
    logmag = -0.5 * mag**2 + n * math.log(mag) - 0.5 * gammaln(n + 1)
    phase = np.exp(1j * n * np.angle(alpha))
    return np.exp(logmag) * phase


def _padded_size(alpha, dim):
    lam = abs(alpha) ** 2
    return dim + int(lam + 12 * math.sqrt(lam) + 60)


def _finish(ideal, dim, policy, layout, what):
    """Cut an (effectively exact) padded amplitude vector to ``dim`` levels."""
    kept = ideal[:dim]
    total = float(np.sum(np.abs(ideal) ** 2))
    defect = float(np.sum(np.abs(ideal[dim:]) ** 2)) / total
    if defect >= policy.norm_tol:
        raise TruncationError(
            f"{what}: truncation at dim={dim} loses norm {defect:.3g} "
            f">= norm_tol={policy.norm_tol:.3g}"
        )
    return StateVector.normalized(kept, layout, defect)


def fock_ket(n, dim):
    """Number state ``|n>`` in a ``dim``-level space."""
    if not 0 <= n < dim:
        raise IndexError(f"level {n} outside 0..{dim - 1}")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return StateVector(amps, (dim,))


def coherent_ket(alpha, policy=DEFAULT_POLICY):
    """Coherent state ``|alpha>`` truncated to ``policy.dim`` levels.

    Truncation is harmless when ``|alpha|^2 + 5|alpha| + 10 <= dim``
    (rule of thumb).

    Raises
    ------
    TruncationError
        If the norm discarded by truncation reaches ``policy.norm_tol``.
    """
    alpha = complex(alpha)
    ideal = _series_amplitudes(alpha, _padded_size(alpha, policy.dim))
    return _finish(ideal, policy.dim, policy, (policy.dim,), f"coherent state alpha={alpha}")


def _cat_normalisation(alpha0, parity):
    # N_pm = sqrt(2 (1 pm exp(-2|alpha0|^2)))
    x = -2.0 * abs(alpha0) ** 2
    if parity > 0:
        return math.sqrt(2.0 * (1.0 + math.exp(x)))
    return math.sqrt(-2.0 * math.expm1(x))


def cat_ket(alpha0, parity, policy=DEFAULT_POLICY):
    """Schrodinger cat ``(|a> +/- |-a>)/N_pm``.

    ``parity`` is ``+1``/``"+"``/``"even"`` or ``-1``/``"-"``/``"odd"``.
    Even cats occupy only even Fock levels and odd cats only odd levels;
    the unused levels are exactly zero.
    """
    sign = _parity_sign(parity)
    if sign < 0 and alpha0 == 0:
        raise DegenerateCatError("odd cat state is undefined for alpha0 = 0")
    size = _padded_size(alpha0, policy.dim)
    coh = _series_amplitudes(complex(alpha0), size)
    n = np.arange(size)
    keep = (n % 2 == 0) if sign > 0 else (n % 2 == 1)
    ideal = np.where(keep, 2.0 * coh, 0.0) / _cat_normalisation(alpha0, sign)
    label = "even" if sign > 0 else "odd"
    return _finish(ideal, policy.dim, policy, (policy.dim,), f"{label} cat alpha0={alpha0}")


def _parity_sign(parity):
    if parity in (1, "+", "even", "plus"):
        return 1
    if parity in (-1, "-", "odd", "minus"):
        return -1
    raise ValueError(f"unknown parity {parity!r}")


def squeezed_fock_ket(s, n, policy=DEFAULT_POLICY):
    """``S(s)|n>`` for ``n`` in {0, 1} with real squeezing ``s``.

    ``S(s) = exp(s (a^dag^2 - a^2) / 2)``; with this sign a positive ``s``
    stretches the x quadrature, so ``S(s)|0>`` and ``S(s)|1>`` approximate
    even and odd cats with real amplitude. The exponential is evaluated on the
    parity sector of a padded space; ``|s| < 2`` is the safe range for
    ``dim <= 64``.
    """
    if n not in (0, 1):
        raise DomainError(f"n must be 0 or 1, got {n!r}")
    dim = policy.dim
    big = max(2 * dim, dim + 40)
    levels = np.arange(n, big, 2)
    # <m+2| (a^dag)^2 |m> = sqrt((m+1)(m+2))
    up = np.sqrt((levels[:-1] + 1.0) * (levels[:-1] + 2.0))
    gen = 0.5 * s * (np.diag(up, k=-1) - np.diag(up, k=1))
    sector = la.expm(gen)[:, 0]
    ideal = np.zeros(big, dtype=complex)
    ideal[levels] = sector
    return _finish(ideal, dim, policy, (dim,), f"squeezed |{n}> with s={s}")


def tmsv_ket(r, phi=math.pi, policy=DEFAULT_POLICY):
    """Two-mode squeezed vacuum ``S2(r e^{i phi})|0,0>``.

    Schmidt form ``sum_n (-e^{i phi} tanh r)^n / cosh r |n,n>``.
    """
    if r < 0:
        raise DomainError(f"r must be >= 0, got {r!r}")
    dim = policy.dim
    lam = -np.exp(1j * phi) * math.tanh(r)
    tail = math.tanh(r) ** (2 * dim)
    if tail >= policy.norm_tol:
        raise TruncationError(
            f"TMSV r={r}: truncation at dim={dim} loses norm {tail:.3g} "
            f">= norm_tol={policy.norm_tol:.3g}"
        )
    amps = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    amps[idx, idx] = lam**idx / math.cosh(r)
    return StateVector.normalized(amps.reshape(-1), (dim, dim), tail)


# ---------------------------------------------------------------------------
# Tensor structure
# ---------------------------------------------------------------------------


def tensor_product(a, b):
    """Kronecker product of two states of the same kind."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes), a.layout + b.layout,
                           1.0 - (1.0 - a.defect) * (1.0 - b.defect))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.entries, b.entries), a.layout + b.layout)
    raise KindMismatchError(
        f"cannot tensor {type(a).__name__} with {type(b).__name__}"
    )


def _check_modes(modes, n_modes):
    modes = [int(m) for m in modes]
    for m in modes:
        if not 0 <= m < n_modes:
            raise IndexError(f"mode {m} out of range for {n_modes} modes")
    if len(set(modes)) != len(modes):
        raise IndexError(f"repeated mode in {modes}")
    return modes


def partial_trace(rho, keep):
    """Reduced state on the modes in ``keep`` (returned in ascending order)."""
    if isinstance(keep, int):
        keep = [keep]
    keep = sorted(_check_modes(keep, rho.n_modes))
    if not keep:
        raise IndexError("keep must name at least one mode")
    n = rho.n_modes
    t = rho.entries.reshape(rho.layout + rho.layout)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for m in range(n):
        if m not in keep:
            col[m] = row[m]
    out = "".join(row[m] for m in keep) + "".join(col[m] for m in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = math.prod(rho.layout[m] for m in keep)
    return DensityMatrix(reduced.reshape(d, d), tuple(rho.layout[m] for m in keep))


def partial_transpose(rho, mode):
    """Transpose the indices of ``mode`` (an int or several ints) only.

    Returns a plain Hermitian ndarray; the result is generally not a state.
    """
    modes = [mode] if isinstance(mode, (int, np.integer)) else list(mode)
    modes = _check_modes(modes, rho.n_modes)
    n = rho.n_modes
    entries = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    t = entries.reshape(rho.layout + rho.layout)
    axes = list(range(2 * n))
    for m in modes:
        axes[m], axes[n + m] = axes[n + m], axes[m]
    d = entries.shape[0]
    return np.transpose(t, axes).reshape(d, d)


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def _psd_eig(rho, psd_tol, name):
    w, v = np.linalg.eigh(rho.entries)
    if w[0] < -psd_tol:
        raise NonPhysicalStateError(
            f"{name} has eigenvalue {w[0]:.3g} below -psd_tol={psd_tol:.3g}"
        )
    w = np.clip(w, 0.0, None)
    cut = w.size * np.finfo(float).eps * max(w[-1], 1.0)
    keep = w > cut
    return w[keep], v[:, keep]


def uhlmann_fidelity(rho, sigma, policy=DEFAULT_POLICY):
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``.

    Square roots come from Hermitian eigendecompositions with eigenvalues
    clamped at zero. The square root is taken of whichever argument has the
    lower numerical rank; for a pure argument this reduces exactly to the
    squared overlap ``<psi|sigma|psi>``.
    """
    if rho.layout != sigma.layout:
        raise LayoutMismatchError(f"layouts differ: {rho.layout} vs {sigma.layout}")
    w_r, v_r = _psd_eig(rho, policy.psd_tol, "rho")
    w_s, v_s = _psd_eig(sigma, policy.psd_tol, "sigma")
    if w_s.size < w_r.size:
        w_r, v_r, other = w_s, v_s, rho.entries
    else:
        other = sigma.entries
    b = v_r * np.sqrt(w_r)
    inner = b.conj().T @ other @ b
    mu = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    f = float(np.sum(np.sqrt(np.clip(mu, 0.0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def trace_distance(rho, sigma):
    """``||rho - sigma||_1 / 2``."""
    if rho.layout != sigma.layout:
        raise LayoutMismatchError(f"layouts differ: {rho.layout} vs {sigma.layout}")
    diff = rho.entries - sigma.entries
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2))))


def log_negativity(rho, split=None):
    """Logarithmic negativity ``log2(1 + 2 E_N)`` across a bipartition.

    ``split`` is a pair of mode collections covering every mode; it defaults
    to ``((0,), (1,))`` for two-mode states. ``E_N`` is the summed magnitude
    of the negative eigenvalues of the partial transpose.
    """
    if split is None:
        if rho.n_modes != 2:
            raise ValueError("split is required for states with more than two modes")
        split = ((0,), (1,))
    side_a, side_b = ([s] if isinstance(s, int) else list(s) for s in split)
    if sorted(side_a + side_b) != list(range(rho.n_modes)) or not side_a or not side_b:
        raise IndexError(f"split {split!r} is not a bipartition of {rho.n_modes} modes")
    pt = partial_transpose(rho, side_b)
    lam = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    e_n = float(-np.sum(lam[lam < 0]))
    return math.log2(1.0 + 2.0 * e_n)


# ---------------------------------------------------------------------------
# Beam splitter
# ---------------------------------------------------------------------------


def _bs_block(total, d, theta):
    """Unitary on the block of fixed photon number ``total`` in two d-level modes.

    Returns (first-mode occupations, unitary). Blocks with ``total < d`` are
    complete, so the result there is the exact beam splitter.
    """
    n1 = np.arange(max(0, total - d + 1), min(total, d - 1) + 1)
    n2 = total - n1
    size = n1.size
    gen = np.zeros((size, size))
    # theta (a_1 a_2^dag - a_1^dag a_2): |n1, n2> -> |n1-1, n2+1> and |n1+1, n2-1>
    for k in range(size - 1):
        # |n1[k], n2[k]> <-> |n1[k+1], n2[k+1]>, n1[k+1] = n1[k] + 1
        amp = math.sqrt((n1[k] + 1.0) * n2[k])
        gen[k + 1, k] = -theta * amp
        gen[k, k + 1] = theta * amp
    return n1, la.expm(gen)


def beam_splitter_apply(state, modes, T):
    """Mix modes ``(i, j)`` on a beam splitter of transmissivity ``T``.

    Mode ``i`` is the signal: ``a_i^dag -> sqrt(T) a_i^dag + sqrt(1-T) a_j^dag``
    and ``a_j^dag -> sqrt(T) a_j^dag - sqrt(1-T) a_i^dag``. The map is exact on
    every component whose photon number in the two modes is below their
    dimension, and unitary everywhere.
    """
    if not 0.0 <= T <= 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {T!r}")
    i, j = _check_modes(modes, state.n_modes)
    if len(modes) != 2:
        raise IndexError("exactly two modes are required")
    d = state.layout[i]
    if state.layout[j] != d:
        raise LayoutMismatchError(f"modes {i} and {j} have different dimensions")
    if T == 1.0:
        return state
    theta = math.acos(math.sqrt(T))
    t = np.moveaxis(state.tensor(), (i, j), (0, 1))
    rest = t.shape[2:]
    flat = t.reshape(d, d, -1)
    out = np.zeros_like(flat)
    for total in range(2 * d - 1):
        n1, u = _bs_block(total, d, theta)
        block = flat[n1, total - n1, :]
        out[n1, total - n1, :] = u @ block
    out = np.moveaxis(out.reshape((d, d) + rest), (0, 1), (i, j))
    return StateVector(out.reshape(-1), state.layout, state.defect)
