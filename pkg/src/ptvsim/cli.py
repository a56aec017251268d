"""Command-line front end.

    ptvsim --preset fig3 --seed 42 --out runs/fig3
    ptvsim --config my.json --override irs.element_count=200 --iterations 200
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .energy import OffloadError
from .engine import RatioError, monte_carlo, ratio_sweep
from .model import ConfigError, Violation, apply_overrides, config_from_dict, config_to_dict
from .output import (
    MANIFEST_SCHEMA,
    ChartSpec,
    emit_chart,
    sha256,
    write_manifest,
    write_ratio_csv,
    write_trajectory_csv,
)
from .presets import PRESETS, Preset, Series

logger = logging.getLogger("ptvsim")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4


def _single_preset(kind: str) -> Preset:
    from .model import ScenarioKind

    return Preset("config", f"Device energy, {kind}", {}, (Series(kind, ScenarioKind(kind)),))


def run_experiment(
    out_dir: str | Path,
    preset: str | None = None,
    config_path: str | Path | None = None,
    overrides: Sequence[str] = (),
    seed: int | None = None,
    iterations: int | None = None,
    workers: int = 1,
    chart: bool = True,
) -> dict[str, Any]:
    """Run a preset or a config file and write CSVs, charts and ``manifest.json``."""
    started = time.perf_counter()
    if (preset is None) == (config_path is None):
        raise ConfigError([Violation("preset/config", "give exactly one of a preset or a config file")])
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError([Violation("preset", f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")])
        spec = PRESETS[preset]
        data = spec.base_dict()
    else:
        with open(config_path) as fh:
            data = json.load(fh)
        spec = None
    data = apply_overrides(data, list(overrides))
    if seed is not None:
        data["master_seed"] = seed
    if iterations is not None:
        data["iterations"] = iterations
    base = config_from_dict(data)
    if spec is None:
        spec = _single_preset(base.scenario_kind.value)
    manifest = _execute(spec, base, Path(out_dir), workers, chart)
    manifest.update(
        preset=preset,
        overrides=list(overrides),
        wall_clock_seconds=round(time.perf_counter() - started, 3),
    )
    write_manifest(Path(out_dir) / "manifest.json", manifest)
    return manifest


def _execute(spec: Preset, base, out: Path, workers: int, chart: bool) -> dict[str, Any]:
    out.mkdir(parents=True, exist_ok=True)
    artifacts: list[Path] = []
    series_meta = []
    if spec.sweep_bits:
        rows = []
        for s in spec.series:
            cfg = s.apply(base)
            logger.info("sweep %s over %d sizes", s.label, len(spec.sweep_bits))
            rows.extend((s.label, p) for p in ratio_sweep(cfg, spec.sweep_bits, workers=workers))
            series_meta.append({"label": s.label, "config": config_to_dict(cfg)})
        path = out / f"{spec.name}_ratio.csv"
        write_ratio_csv(path, rows)
        artifacts.append(path)
        if chart:
            img = out / f"{spec.name}_ratio.png"
            emit_chart([path], ChartSpec(spec.title, "ratio"), img)
            artifacts.append(img)
    else:
        csvs = []
        for s in spec.series:
            cfg = s.apply(base)
            logger.info("simulate %s", s.label)
            result = monte_carlo(cfg, workers=workers)
            path = out / f"{spec.name}_{s.label}.csv"
            write_trajectory_csv(path, result, cfg.time.tti_seconds)
            csvs.append(path)
            series_meta.append({"label": s.label, "config": config_to_dict(cfg), "csv": path.name})
        artifacts.extend(csvs)
        if chart:
            img = out / f"{spec.name}_energy.png"
            emit_chart(csvs, ChartSpec(spec.title, "trajectory"), img, labels=[s.label for s in spec.series])
            artifacts.append(img)
    return {
        "schema_version": MANIFEST_SCHEMA,
        "package_version": __version__,
        "name": spec.name,
        "master_seed": base.master_seed,
        "iterations": base.iterations,
        "config": config_to_dict(base),
        "series": series_meta,
        "sweep_bits": list(spec.sweep_bits),
        "artifacts": [{"path": p.name, "sha256": sha256(p)} for p in artifacts],
    }


def reproduce(manifest_path: str | Path, out_dir: str | Path) -> list[str]:
    """Re-run a manifest's configuration; return names of CSVs whose bytes differ."""
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    base = config_from_dict(manifest["config"])
    if manifest["name"] in PRESETS:
        spec = PRESETS[manifest["name"]]
    else:
        spec = _single_preset(base.scenario_kind.value)
    fresh = _execute(spec, base, Path(out_dir), workers=1, chart=False)
    got = {a["path"]: a["sha256"] for a in fresh["artifacts"]}
    return [
        a["path"] for a in manifest["artifacts"]
        if a["path"].endswith(".csv") and got.get(a["path"]) != a["sha256"]
    ]


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ptvsim", description=__doc__.splitlines()[0])
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--config", type=Path, help="JSON scenario config")
    ap.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                    help="dotted-path config override, repeatable")
    ap.add_argument("--seed", type=_seed)
    ap.add_argument("--iterations", type=int)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("runs"))
    ap.add_argument("--no-chart", action="store_true")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        manifest = run_experiment(
            args.out,
            preset=args.preset,
            config_path=args.config,
            overrides=args.override,
            seed=args.seed,
            iterations=args.iterations,
            workers=args.workers,
            chart=not args.no_chart,
        )
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except (RatioError, OffloadError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(manifest['artifacts'])} artifacts to {args.out} "
          f"in {manifest['wall_clock_seconds']:.1f} s")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
