"""Command-line driver.

Subcommands ``direct``, ``teleport-dv`` and ``teleport-cv`` evaluate one
scheme over a grid; ``sweep`` takes the scheme from ``--scheme`` or the
config file; ``crossover`` searches the loss at which DV teleportation
overtakes direct distribution. Exit status is 0 on success, 2 on invalid
input and 1 on runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, DomainError, HybridSatError
from .sweep import Crossover, ScenarioConfig, emit_records, find_crossover, run_scenario

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


def parse_grid(text):
    """Parse ``"0.5,1,2"`` or an inclusive range ``"start:stop:step"``."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            pieces = part.split(":")
            if len(pieces) != 3:
                raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {part!r}")
            start, stop, step = map(float, pieces)
            if step <= 0 or stop < start:
                raise argparse.ArgumentTypeError(f"bad range {part!r}")
            n = int(round((stop - start) / step))
            values.extend(start + i * step for i in range(n + 1))
        else:
            values.append(float(part))
    return values


def _grid_type(text):
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


# flag destination -> config key
_OVERRIDES = {
    "scheme": "scheme", "alpha0": "alpha0", "r": "r", "gain_mode": "gain_mode",
    "gain": "gain", "ta": "ta", "tb": "tb", "loss_db": "loss_db",
    "dim": "dim", "kmax": "kmax", "delta": "delta", "variant": "variant",
    "metric": "metric", "workers": "workers",
}


def _add_common(p):
    p.add_argument("--config", help="JSON scenario file; flags override its fields")
    p.add_argument("--alpha0", type=_grid_type, help="cat amplitude(s), e.g. 1,1.5 or 0.1:0.5:0.1")
    p.add_argument("--r", type=_grid_type, help="TMSV squeezing value(s)")
    p.add_argument("--gain-mode", help="unity, tuned or fixed(g)")
    p.add_argument("--gain", type=float, help="gain for --gain-mode fixed")
    p.add_argument("--ta", type=_grid_type, help="transmissivity grid of the CV-mode link")
    p.add_argument("--tb", type=_grid_type, help="transmissivity grid of the DV-mode link")
    p.add_argument("--loss-db", type=_grid_type, help="symmetric total-loss grid in dB")
    p.add_argument("--dim", type=int, help="Fock cut-off for CV modes")
    p.add_argument("--kmax", type=int, help="Fock cut-off of the teleported DV mode")
    p.add_argument("--delta", type=float, help="trace tolerance for the k_max search")
    p.add_argument("--variant", help="exact, large, small or coherent")
    p.add_argument("--metric", help="comma-separated subset of fidelity,logneg")
    p.add_argument("--workers", type=int, help="parallel grid workers")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hybridsat",
        description="Distribution of hybrid cat/photon-number entanglement over lossy links.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("direct", "teleport-dv", "teleport-cv", "sweep"):
        p = sub.add_parser(name, help=f"evaluate the {name} scheme over a grid"
                           if name != "sweep" else "run a scenario from --config/--scheme")
        _add_common(p)
        if name == "sweep":
            p.add_argument("--scheme", choices=("direct", "teleport-dv", "teleport-cv"))
        p.add_argument("--output", default="-", help="output path, '-' for stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    p = sub.add_parser("crossover", help="loss where DV teleportation overtakes direct distribution")
    p.add_argument("--alpha0", type=float, required=True)
    p.add_argument("--r", type=float, default=2.5)
    p.add_argument("--dim", type=int, default=40)
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must hold a JSON object")
    return data


def config_from_args(args):
    """Merge the JSON config (if any) with explicit flag overrides."""
    data = _load_config(args.config) if args.config else {}
    if args.command != "sweep":
        data["scheme"] = args.command
    for dest, key in _OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            data[key] = value
    # an explicit channel flag replaces the other channel form from the file
    if args.loss_db is not None:
        data.pop("ta", None), data.pop("tb", None)
    if args.ta is not None or args.tb is not None:
        data.pop("loss_db", None)
    return ScenarioConfig.from_mapping(data)


def _crossover(args):
    result = find_crossover(args.alpha0, args.r, ScenarioConfig("direct", (args.alpha0,),
                                                                loss_db=(0.0,), dim=args.dim))
    if isinstance(result, Crossover):
        payload = {"alpha0": args.alpha0, "r": args.r, "crossover_db": result.loss_db,
                   "bracket_db": list(result.bracket)}
        text = f"crossover at {result.loss_db:.3f} dB (bracket {result.bracket[0]:.3f}-{result.bracket[1]:.3f})"
    else:
        better = "direct" if result.sign > 0 else "teleport-dv"
        payload = {"alpha0": args.alpha0, "r": args.r, "crossover_db": None, "better": better}
        text = f"no crossover in {result.range_db[0]:g}-{result.range_db[1]:g} dB; {better} is better throughout"
    print(json.dumps(payload) if args.format == "json" else text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "crossover":
            _crossover(args)
            return EXIT_OK
        config = config_from_args(args)
        records = run_scenario(config)
        emit_records(records, args.format, args.output)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HybridSatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
