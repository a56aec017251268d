"""CSV artifacts, charts and the run manifest."""
from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .engine import AggregateResult, RatioPoint

MANIFEST_SCHEMA = "ptvsim.manifest/1"

TRAJECTORY_COLUMNS = (
    "slot", "time_s", "mean_E_mJ", "ci_low_mJ", "ci_high_mJ", "mean_Ev_mJ", "mean_Eo_mJ", "mean_Ec_mJ",
)
RATIO_COLUMNS = ("l_bits", "scenario", "ratio_mean", "ratio_ci_low", "ratio_ci_high")


class ChartError(ValueError):
    pass


def fmt(x: float) -> str:
    """Fixed 9-significant-digit formatting used in every CSV."""
    return format(float(x), ".9g")


def write_trajectory_csv(path: Path, result: AggregateResult, tti_seconds: float) -> None:
    mj = 1e3
    pad = lambda a: np.concatenate([[0.0], a])  # noqa: E731 - no ledger at slot 0
    ev, eo, ec = pad(result.mean_e_v), pad(result.mean_e_o), pad(result.mean_e_c)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for t in range(len(result.mean_series)):
            w.writerow([
                t, fmt(t * tti_seconds),
                fmt(result.mean_series[t] * mj), fmt(result.ci_low[t] * mj), fmt(result.ci_high[t] * mj),
                fmt(ev[t] * mj), fmt(eo[t] * mj), fmt(ec[t] * mj),
            ])


def write_ratio_csv(path: Path, rows: Sequence[tuple[str, RatioPoint]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RATIO_COLUMNS)
        for label, p in rows:
            w.writerow([p.l_bits, label, fmt(p.ratio_mean), fmt(p.ratio_ci_low), fmt(p.ratio_ci_high)])


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True)
class ChartSpec:
    title: str
    kind: str  # "trajectory" or "ratio"
    width_in: float = 6.4
    height_in: float = 4.2
    dpi: int = 100


def _read_numeric(path: Path, columns: Sequence[str], text_columns: Sequence[str] = ()) -> list[dict[str, Any]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ChartError(f"{path}: empty file") from None
        missing = [c for c in columns if c not in header]
        if missing:
            raise ChartError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if len(raw) != len(header):
                raise ChartError(f"{path}: row {lineno} has {len(raw)} fields, expected {len(header)}")
            rec = dict(zip(header, raw))
            for c in columns:
                if c in text_columns:
                    continue
                try:
                    rec[c] = float(rec[c])
                except ValueError:
                    raise ChartError(f"{path}: row {lineno}, column {c!r}: not a number ({rec[c]!r})") from None
            rows.append(rec)
    if not rows:
        raise ChartError(f"{path}: empty series")
    return rows


def emit_chart(csv_paths: Sequence[Path], spec: ChartSpec, out_path: Path, labels: Sequence[str] | None = None) -> int:
    """Render a deterministic line chart; returns the number of series drawn.

    Trajectory charts draw one series per CSV; ratio charts draw one series
    per distinct ``scenario`` value, in order of first appearance.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series: list[tuple[str, list[float], list[float]]] = []
    if spec.kind == "trajectory":
        labels = list(labels) if labels is not None else [Path(p).stem for p in csv_paths]
        for label, p in zip(labels, csv_paths):
            rows = _read_numeric(Path(p), ("slot", "mean_E_mJ"))
            series.append((label, [r["slot"] for r in rows], [r["mean_E_mJ"] for r in rows]))
        xlabel, ylabel = "time slot", "energy (mJ)"
    elif spec.kind == "ratio":
        (p,) = csv_paths
        rows = _read_numeric(Path(p), ("l_bits", "scenario", "ratio_mean"), text_columns=("scenario",))
        by: dict[str, tuple[list[float], list[float]]] = {}
        for r in rows:
            xs, ys = by.setdefault(r["scenario"], ([], []))
            xs.append(r["l_bits"] / 1e3)
            ys.append(r["ratio_mean"])
        series = [(k, xs, ys) for k, (xs, ys) in by.items()]
        xlabel, ylabel = "data size (Kbits)", "gain / consumption"
    else:
        raise ChartError(f"unknown chart kind {spec.kind!r}")

    fig, ax = plt.subplots(figsize=(spec.width_in, spec.height_in), dpi=spec.dpi)
    for label, xs, ys in series:
        ax.plot(xs, ys, label=label, marker="o" if spec.kind == "ratio" else None, markersize=3)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, format="png", metadata={"Software": None})
    plt.close(fig)
    return len(series)


def write_manifest(path: Path, manifest: dict[str, Any]) -> None:
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
