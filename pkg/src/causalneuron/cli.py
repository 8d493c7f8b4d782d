"""Command-line front end: record, train, eval, ga, synthetic, export.

Exit codes: 0 on success, 2 on configuration errors (bad flags, bad
config files, inconsistent inputs), 3 on I/O errors. Config files are
flat ``key = value`` text; every subcommand that takes one accepts
``--dump-config`` to print its defaults in the same format.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import fields as dataclass_fields

import numpy as np

from .encoder import SECTION_OFFSETS, SECTION_SIZES
from .ga import GENE_NAMES, GaConfig, run_ga
from .metrics import score_run
from .neuron import Detector
from .plasticity import PlasticityConfig
from .records import EpisodeRecord
from .recording import record_pong_episode
from .runner import replay, train_on_record
from .synthetic import SyntheticConfig, generate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

PARAM_DEFAULTS = {
    "d_bar": 0.056,
    "w_min": -0.017,
    "w_max": 0.48,
    "d_s": 0.23,
    "T_P": 100,
}


class ConfigError(Exception):
    """Bad flag value or malformed config file (exit code 2)."""


def load_config(path, defaults: dict) -> dict:
    """Read a flat key=value file, coercing each value to its default's type."""
    out = dict(defaults)
    try:
        fh = open(path, "r")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            if key not in defaults:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = _coerce(value, defaults[key])
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}")
    return out


def _coerce(text: str, default):
    if isinstance(default, bool):
        if text.lower() in ("true", "1", "yes"):
            return True
        if text.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        return float(text)
    if isinstance(default, tuple):
        return tuple(int(v) for v in text.replace(",", " ").split())
    return text


def dump_config(defaults: dict, fh=sys.stdout) -> None:
    for key, value in defaults.items():
        if isinstance(value, tuple):
            value = " ".join(str(v) for v in value)
        fh.write(f"{key} = {value}\n")


def _params_from_file(path) -> PlasticityConfig:
    values = load_config(path, PARAM_DEFAULTS) if path else dict(PARAM_DEFAULTS)
    try:
        return PlasticityConfig(
            d_bar=values["d_bar"],
            w_min=values["w_min"],
            w_max=values["w_max"],
            d_s=values["d_s"],
            T_P=values["T_P"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc))


def _load_record(path) -> EpisodeRecord:
    return EpisodeRecord.load(path)


# -- subcommands ------------------------------------------------------------

def cmd_record(args) -> int:
    rec = record_pong_episode(args.duration, args.seed, clock_mode=args.clock)
    rec.save(args.out)
    print(
        f"wrote {args.out}: {rec.n_steps} steps, "
        f"{len(rec.reward_steps)} rewards, {len(rec.punishment_steps)} punishments"
    )
    return EXIT_OK


def cmd_train(args) -> int:
    if args.dump_config:
        dump_config(PARAM_DEFAULTS)
        return EXIT_OK
    if not args.record:
        raise ConfigError("--record is required")
    cfg = _params_from_file(args.params)
    rec = _load_record(args.record)
    detector = Detector(rec.n_channels, cfg)

    freeze_at = None
    if args.freeze_after is not None:
        if args.freeze_after < 0:
            raise ConfigError("--freeze-after must be >= 0")
        freeze_at = round(args.freeze_after * 1000 / rec.step_ms)

    window_steps = args.window * 1000 // rec.step_ms
    if freeze_at is None:
        fires, rows = train_on_record(rec, detector)
    else:
        def hook(boundary_step, det):
            if boundary_step >= freeze_at:
                det.frozen = True
        fires, rows = train_on_record(rec, detector, on_window=hook)
        detector.frozen = True

    eval_window = (max(rec.n_steps - window_steps, 0), rec.n_steps)
    r_value = score_run(fires, rec.reward_steps.tolist(), cfg.T_P, eval_window)
    print(
        f"trained on {args.record}: {len(fires)} fires, "
        f"stability {detector.stability:.2f}, R({args.window}s window) = {r_value:.4f}"
    )

    if args.out:
        detector.save_snapshot(args.out)
        print(f"wrote snapshot {args.out}")
    if args.report:
        with open(args.report, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["window_start_s", "firing_hz", "stability", "abs_weight_change"])
            for row in rows:
                start_s = row.window * 10
                writer.writerow(
                    [start_s, f"{row.fire_rate_hz:.6g}", f"{row.stability:.6g}",
                     f"{row.abs_weight_change:.6g}"]
                )
        print(f"wrote report {args.report}")
    if args.resources:
        res = detector.resource_array()
        wts = detector.weight_array()
        with open(args.resources, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["section", "index_in_section", "channel", "resource", "weight"])
            for name, off in SECTION_OFFSETS.items():
                for k in range(SECTION_SIZES[name]):
                    ch = off + k
                    if ch >= len(res):
                        break
                    writer.writerow([name, k, ch, f"{res[ch]:.9g}", f"{wts[ch]:.9g}"])
        print(f"wrote resources {args.resources}")
    return EXIT_OK


def cmd_eval(args) -> int:
    if args.dump_config:
        dump_config(PARAM_DEFAULTS)
        return EXIT_OK
    if not args.record or not args.snapshot:
        raise ConfigError("--record and --snapshot are required")
    cfg = _params_from_file(args.params)
    rec = _load_record(args.record)
    trained = Detector.load_snapshot(args.snapshot, cfg)
    if trained.n != rec.n_channels:
        raise ConfigError(
            f"snapshot has {trained.n} synapses but record has {rec.n_channels} channels"
        )
    detector = trained.frozen_clone()
    fires = replay(detector, rec)
    window_steps = args.window * 1000 // rec.step_ms
    eval_window = (max(rec.n_steps - window_steps, 0), rec.n_steps)
    r_value = score_run(fires, rec.reward_steps.tolist(), cfg.T_P, eval_window)
    print(f"R({args.window}s window) = {r_value:.4f}")
    return EXIT_OK


GA_DEFAULTS = {
    "population_size": 300,
    "elitism_fraction": 0.1,
    "mutation_prob": 0.5,
    "stagnation_generations": 3,
    "eval_window_s": 600,
    "T_P": 100,
    "seed": 0,
    "max_generations": 0,  # 0 = unlimited
}


def cmd_ga(args) -> int:
    if args.dump_config:
        dump_config(GA_DEFAULTS)
        return EXIT_OK
    if not args.record:
        raise ConfigError("--record is required")
    values = load_config(args.config, GA_DEFAULTS) if args.config else dict(GA_DEFAULTS)
    if args.seed is not None:
        values["seed"] = args.seed
    max_gen = values.pop("max_generations")
    try:
        cfg = GaConfig(max_generations=max_gen if max_gen > 0 else None, **values)
    except ValueError as exc:
        raise ConfigError(str(exc))
    rec = _load_record(args.record)
    try:
        best, history = run_ga(cfg, rec)
    except ValueError as exc:
        raise ConfigError(str(exc))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["generation", "best_R", "mean_R", *GENE_NAMES])
            for st in history:
                writer.writerow(
                    [st.generation, f"{st.best_fitness:.9g}", f"{st.mean_fitness:.9g}"]
                    + [f"{v:.9g}" for v in st.best_genome.as_tuple()]
                )
        print(f"wrote history {args.out}")
    print(
        "best genome: "
        + " ".join(f"{n}={v:.6g}" for n, v in zip(GENE_NAMES, best.as_tuple()))
    )
    print(f"best fitness: {max(st.best_fitness for st in history):.4f}")
    return EXIT_OK


SYNTHETIC_DEFAULTS = {
    "n_channels": 20,
    "cause_channels": (2, 7, 13),
    "lag": 100,
    "n_steps": 300_000,
    "noise_rate": 0.001,
    "min_gap": 300,
    "max_gap": 1200,
    "seed": 0,
}


def cmd_synthetic(args) -> int:
    if args.dump_config:
        dump_config(SYNTHETIC_DEFAULTS)
        return EXIT_OK
    if not args.out:
        raise ConfigError("--out is required")
    values = load_config(args.config, SYNTHETIC_DEFAULTS) if args.config else dict(SYNTHETIC_DEFAULTS)
    if args.seed is not None:
        values["seed"] = args.seed
    try:
        cfg = SyntheticConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))
    rec = generate(cfg)
    rec.save(args.out)
    print(f"wrote {args.out}: {rec.n_steps} steps, {len(rec.reward_steps)} rewards")
    return EXIT_OK


def cmd_export(args) -> int:
    rec = _load_record(args.record)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "kind", "channels"])
        events = sorted(
            [(int(t), "reward") for t in rec.reward_steps]
            + [(int(t), "punishment") for t in rec.punishment_steps]
        )
        ei = 0
        for t, chans in rec.frames():
            while ei < len(events) and events[ei][0] <= t:
                writer.writerow([events[ei][0], events[ei][1], ""])
                ei += 1
            writer.writerow([t, "spikes", " ".join(str(c) for c in chans)])
        for t, kind in events[ei:]:
            writer.writerow([t, kind, ""])
    print(f"wrote {args.out}")
    return EXIT_OK


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalneuron",
        description="Causal-precursor detector neuron: recording, training, "
        "evaluation and parameter search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("record", help="record a seeded pong episode")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=float, default=2000.0, help="seconds")
    p.add_argument("--out", required=True)
    p.add_argument("--clock", choices=("shared", "bernoulli"), default="shared")
    p.set_defaults(func=cmd_record)

    p = sub.add_parser("train", help="train a detector on a record")
    p.add_argument("--record")
    p.add_argument("--params", help="plasticity parameter file (key = value)")
    p.add_argument("--out", help="snapshot output (.npz)")
    p.add_argument("--report", help="per-10s time-series CSV")
    p.add_argument("--resources", help="per-synapse resource CSV")
    p.add_argument("--window", type=int, default=600, help="R window, seconds")
    p.add_argument("--freeze-after", type=float, default=None,
                   help="freeze plasticity after this many seconds")
    p.add_argument("--dump-config", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="frozen-plasticity evaluation of a snapshot")
    p.add_argument("--record")
    p.add_argument("--snapshot")
    p.add_argument("--params")
    p.add_argument("--window", type=int, default=600)
    p.add_argument("--dump-config", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ga", help="genetic parameter search on a record")
    p.add_argument("--record")
    p.add_argument("--config", help="GA config file (key = value)")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--out", help="generation-history CSV")
    p.add_argument("--dump-config", action="store_true")
    p.set_defaults(func=cmd_ga)

    p = sub.add_parser("synthetic", help="generate a ground-truth causal record")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--out")
    p.add_argument("--dump-config", action="store_true")
    p.set_defaults(func=cmd_synthetic)

    p = sub.add_parser("export", help="dump a record as CSV for inspection")
    p.add_argument("--record", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
