"""Scenario configuration, parameter sweeps, crossover search and output.

A :class:`ScenarioConfig` describes a grid over ``alpha0``, ``r`` and the
channel (either explicit ``T_A``/``T_B`` grids or a symmetric total-loss grid
in dB). :func:`run_scenario` evaluates every grid point, optionally in a
thread pool, and returns records in grid order.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

from .cv_teleport import fidelity_cv_closed, fidelity_cv_exact
from .direct import ChannelPair, direct_metrics
from .dv_teleport import FockTruncation, TeleportParams, choose_kmax, dv_metrics, tuned_gain
from .errors import ConfigError, DomainError
from .fock import TruncationPolicy
from .hybrid import Variant

__all__ = [
    "QUBIT_LIMIT",
    "COHERENT_LIMIT",
    "loss_db_to_transmissivity",
    "ScenarioConfig",
    "SweepRecord",
    "run_scenario",
    "evaluate_point",
    "Crossover",
    "NoCrossover",
    "find_crossover",
    "emit_records",
]

# Best fidelities reachable by measure-and-prepare for qubits and for coherent states.
QUBIT_LIMIT = 2.0 / 3.0
COHERENT_LIMIT = 0.5

SCHEMES = ("direct", "teleport-dv", "teleport-cv")
GAIN_MODES = ("unity", "tuned", "fixed")
METRICS = ("fidelity", "logneg")


def loss_db_to_transmissivity(loss_db):
    """Per-channel transmissivity ``10^(-loss_db/10)``."""
    if loss_db < 0:
        raise DomainError(f"loss must be >= 0 dB, got {loss_db!r}")
    return 10.0 ** (-loss_db / 10.0)


def _as_tuple(value, name):
    if value is None:
        return None
    if isinstance(value, (int, float)):
        return (float(value),)
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(name, f"expected a number or list of numbers, got {value!r}") from exc


def _parse_gain_mode(mode, gain):
    """Accept ``unity``, ``tuned``, ``fixed`` with ``gain``, or ``fixed(1.2)``/``fixed:1.2``."""
    text = str(mode).strip().lower()
    for prefix in ("fixed(", "fixed:"):
        if text.startswith(prefix):
            value = text[len(prefix):].rstrip(")")
            try:
                gain = float(value)
            except ValueError as exc:
                raise ConfigError("gain_mode", f"bad fixed gain {value!r}") from exc
            text = "fixed"
    if text not in GAIN_MODES:
        raise ConfigError("gain_mode", f"must be one of {GAIN_MODES} or fixed(g), got {mode!r}")
    if text == "fixed":
        if gain is None or not gain > 0:
            raise ConfigError("gain", f"fixed gain needs a value > 0, got {gain!r}")
        return text, float(gain)
    return text, None


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated sweep description.

    Exactly one channel specification is used: ``loss_db`` (symmetric total
    loss, split evenly between the links) or the ``T_A`` x ``T_B`` grid.
    ``k_max=None`` picks the cut-off per point with :func:`choose_kmax`;
    ``metrics=None`` requests every metric the scheme supports.
    """

    scheme: str
    alpha0: tuple
    r: tuple = (2.5,)
    gain_mode: str = "unity"
    gain: float | None = None
    T_A: tuple | None = None
    T_B: tuple | None = None
    loss_db: tuple | None = None
    variant: str = "exact"
    dim: int = 40
    k_max: int | None = None
    delta: float = 1e-14
    metrics: tuple | None = None
    workers: int = 1

    def __post_init__(self):
        def set_(name, value):
            object.__setattr__(self, name, value)

        if self.scheme not in SCHEMES:
            raise ConfigError("scheme", f"must be one of {SCHEMES}, got {self.scheme!r}")
        for name in ("alpha0", "r", "T_A", "T_B", "loss_db"):
            set_(name, _as_tuple(getattr(self, name), name))
        mode, gain = _parse_gain_mode(self.gain_mode, self.gain)
        set_("gain_mode", mode)
        set_("gain", gain)
        try:
            set_("variant", Variant(self.variant).value)
        except ValueError as exc:
            raise ConfigError("variant", f"unknown variant {self.variant!r}") from exc
        metrics = self.metrics
        if metrics is None:
            metrics = ("fidelity",) if self.scheme == "teleport-cv" else METRICS
        elif isinstance(metrics, str):
            metrics = tuple(m.strip() for m in metrics.split(",") if m.strip())
        set_("metrics", tuple(metrics))

        if not self.alpha0:
            raise ConfigError("alpha0", "grid is empty")
        if any(not a > 0 for a in self.alpha0):
            raise ConfigError("alpha0", "values must be > 0")
        if not self.r:
            raise ConfigError("r", "grid is empty")
        if any(not v >= 0 for v in self.r):
            raise ConfigError("r", "values must be >= 0")
        if self.loss_db is not None:
            if self.T_A is not None or self.T_B is not None:
                raise ConfigError("loss_db", "give either loss_db or T_A/T_B grids, not both")
            if not self.loss_db:
                raise ConfigError("loss_db", "grid is empty")
            if any(not v >= 0 for v in self.loss_db):
                raise ConfigError("loss_db", "values must be >= 0")
        else:
            for name in ("T_A", "T_B"):
                grid = getattr(self, name)
                if not grid:
                    raise ConfigError(name, "grid is empty or missing")
                if any(not 0 <= v <= 1 for v in grid):
                    raise ConfigError(name, "values must lie in [0, 1]")
        if not self.metrics:
            raise ConfigError("metrics", "at least one metric is required")
        for m in self.metrics:
            if m not in METRICS:
                raise ConfigError("metrics", f"unknown metric {m!r}")
        if self.scheme == "teleport-cv":
            if "logneg" in self.metrics:
                raise ConfigError("metrics", "logneg is not available for teleport-cv")
            if self.gain_mode != "unity":
                raise ConfigError("gain_mode", "teleport-cv supports unity gain only")
            if self.variant == "coherent":
                raise ConfigError("variant", "teleport-cv supports exact, large and small")
        if self.scheme == "teleport-dv" and self.variant != "exact":
            raise ConfigError("variant", "teleport-dv uses the exact state only")
        if int(self.dim) != self.dim or self.dim < 2:
            raise ConfigError("dim", f"must be an integer >= 2, got {self.dim!r}")
        if self.k_max is not None and (int(self.k_max) != self.k_max or self.k_max < 0):
            raise ConfigError("k_max", f"must be a non-negative integer, got {self.k_max!r}")
        if not self.delta > 0:
            raise ConfigError("delta", f"must be > 0, got {self.delta!r}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError("workers", f"must be an integer >= 1, got {self.workers!r}")

    # keys accepted in a JSON config file, mapped to field names
    _KEYS = {
        "scheme": "scheme", "alpha0": "alpha0", "r": "r",
        "gain_mode": "gain_mode", "gain": "gain",
        "ta": "T_A", "T_A": "T_A", "tb": "T_B", "T_B": "T_B",
        "loss_db": "loss_db", "variant": "variant", "dim": "dim",
        "kmax": "k_max", "k_max": "k_max", "delta": "delta",
        "metric": "metrics", "metrics": "metrics", "workers": "workers",
    }

    @classmethod
    def from_mapping(cls, mapping):
        """Build from a JSON-style mapping whose keys mirror the CLI flags."""
        kwargs = {}
        for key, value in mapping.items():
            if key not in cls._KEYS:
                raise ConfigError(key, "unknown configuration field")
            kwargs[cls._KEYS[key]] = value
        for name in ("scheme", "alpha0"):
            if name not in kwargs:
                raise ConfigError(name, "required field is missing")
        return cls(**kwargs)

    def channels(self):
        """Channel grid in lexicographic order, with the nominal total loss."""
        if self.loss_db is not None:
            return [(ChannelPair.from_total_loss_db(L), L) for L in self.loss_db]
        return [(ChannelPair(ta, tb), None) for ta, tb in itertools.product(self.T_A, self.T_B)]

    def grid(self):
        """All (alpha0, r, channel) points, alpha0 slowest."""
        return list(itertools.product(self.alpha0, self.r, self.channels()))


@dataclass(frozen=True)
class SweepRecord:
    """One evaluated grid point. Optional metrics are ``None`` when not computed."""

    scheme: str
    variant: str
    alpha0: float
    r: float
    g_mode: str
    g: float
    T_A: float
    T_B: float
    total_loss_db: float
    dim: int
    k_max: int | None
    fidelity: float | None
    log_negativity: float | None
    runtime_ms: float
    qubit_limit: float = QUBIT_LIMIT
    coherent_limit: float = COHERENT_LIMIT
    above_qubit_limit: bool | None = None
    above_coherent_limit: bool | None = None


def _gain(config, ch):
    if config.gain_mode == "tuned":
        return tuned_gain(ch)
    if config.gain_mode == "fixed":
        return config.gain
    return 1.0


def evaluate_point(config, alpha0, r, ch, nominal_loss=None):
    """Evaluate one grid point of ``config``."""
    start = time.perf_counter()
    want_f = "fidelity" in config.metrics
    want_e = "logneg" in config.metrics
    fidelity = logneg = k_max = None
    g = 1.0
    if config.scheme == "direct":
        policy = TruncationPolicy(dim=config.dim)
        fidelity, logneg = direct_metrics(alpha0, ch, policy, config.variant)
    else:
        g = _gain(config, ch)
        params = TeleportParams(g, r, ch)
        if config.scheme == "teleport-dv":
            k_max = config.k_max
            if k_max is None:
                k_max = choose_kmax(params, config.delta, alpha0)
            fidelity, logneg = dv_metrics(alpha0, params, FockTruncation(k_max, config.delta))
        elif config.variant == "exact":
            fidelity = fidelity_cv_exact(alpha0, params)
        else:
            fidelity = fidelity_cv_closed(config.variant, alpha0, params)
    fidelity = fidelity if want_f else None
    logneg = logneg if want_e else None
    total = ch.total_loss_db if nominal_loss is None else nominal_loss
    return SweepRecord(
        scheme=config.scheme,
        variant=config.variant,
        alpha0=alpha0,
        r=r,
        g_mode=config.gain_mode,
        g=g,
        T_A=ch.T_A,
        T_B=ch.T_B,
        total_loss_db=total,
        dim=config.dim,
        k_max=k_max,
        fidelity=fidelity,
        log_negativity=logneg,
        runtime_ms=(time.perf_counter() - start) * 1e3,
        above_qubit_limit=None if fidelity is None else fidelity > QUBIT_LIMIT,
        above_coherent_limit=None if fidelity is None else fidelity > COHERENT_LIMIT,
    )


def run_scenario(config):
    """Evaluate every grid point; records come back in grid order."""
    points = config.grid()
    task = lambda p: evaluate_point(config, p[0], p[1], p[2][0], p[2][1])
    if config.workers == 1:
        return [task(p) for p in points]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(task, points))


# ---------------------------------------------------------------------------
# Crossover search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Crossover:
    """Loss at which DV teleportation overtakes direct distribution.

    ``bracket`` is the final bisection interval; the fidelity difference
    changes sign across it.
    """

    loss_db: float
    bracket: tuple

    def __float__(self):
        return self.loss_db


@dataclass(frozen=True)
class NoCrossover:
    """The fidelity difference kept one sign over the whole scanned range.

    ``sign`` is +1 when direct distribution was better throughout.
    """

    sign: int
    range_db: tuple


def _difference(alpha0, r, loss_db, config):
    ch = ChannelPair.from_total_loss_db(loss_db)
    policy = TruncationPolicy(dim=config.dim)
    f_direct, _ = direct_metrics(alpha0, ch, policy, Variant.EXACT)
    params = TeleportParams(1.0, r, ch)
    f_dv, _ = dv_metrics(alpha0, params)
    return f_direct - f_dv


def find_crossover(alpha0, r, config=None, lo=0.0, hi=40.0, step=1.0, tol=0.05):
    """Symmetric total loss where ``F_direct - F_dvtel`` changes sign.

    A coarse scan over ``[lo, hi]`` in ``step`` dB locates the first sign
    change, then bisection narrows it to ``tol`` dB. ``config`` supplies
    ``dim`` for the direct-distribution state.
    """
    config = config or ScenarioConfig("direct", (alpha0,), loss_db=(0.0,))
    if not alpha0 > 0:
        raise DomainError(f"alpha0 must be > 0, got {alpha0!r}")
    n = int(round((hi - lo) / step))
    grid = [lo + i * (hi - lo) / n for i in range(n + 1)]
    prev_x, prev_d = grid[0], _difference(alpha0, r, grid[0], config)
    if prev_d == 0:
        return Crossover(prev_x, (prev_x, prev_x))
    for x in grid[1:]:
        d = _difference(alpha0, r, x, config)
        if d == 0 or (d > 0) != (prev_d > 0):
            a, b, da = prev_x, x, prev_d
            while b - a > tol:
                m = 0.5 * (a + b)
                dm = _difference(alpha0, r, m, config)
                if (dm > 0) == (da > 0) and dm != 0:
                    a, da = m, dm
                else:
                    b = m
            return Crossover(0.5 * (a + b), (a, b))
        prev_x, prev_d = x, d
    return NoCrossover(1 if prev_d > 0 else -1, (lo, hi))


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

FIELD_NAMES = tuple(f.name for f in fields(SweepRecord))


def _format(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _json_value(value):
    if isinstance(value, float) and math.isfinite(value):
        return float(format(value, ".12g"))
    return value


def _render(records, fmt):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(FIELD_NAMES)
        for rec in records:
            writer.writerow([_format(getattr(rec, name)) for name in FIELD_NAMES])
        return buf.getvalue()
    if fmt == "json":
        rows = [{k: _json_value(v) for k, v in asdict(rec).items()} for rec in records]
        return json.dumps(rows, indent=1) + "\n"
    raise ConfigError("format", f"must be csv or json, got {fmt!r}")


def emit_records(records, fmt, destination=None):
    """Write records as CSV or JSON to a path, a text stream, or stdout.

    CSV has a header of the record field names in declared order; floats are
    written with 12 significant digits and infinities as ``inf``. JSON is an
    array of flat objects (infinities as ``Infinity``).

    Raises
    ------
    OSError
        If the destination cannot be written; the message names the path.
    """
    text = _render(records, fmt)
    if destination is None or destination == "-":
        sys.stdout.write(text)
        return
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise type(exc)(exc.errno, f"cannot write records: {exc.strerror}", str(destination)) from exc
