"""Result records, run manifests, and CSV persistence.

A run directory holds ``manifest.json`` (spec, seed, suite version, fixture
checksums, timestamp) and ``records.csv`` (one row per sweep cell, sorted
canonically, floats written with shortest round-trip repr so identical runs
produce byte-identical files). Derived analyses are written next to them by
the fit / intersect / bound / report commands.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

RECORD_COLUMNS = (
    "sequence",
    "tau",
    "qubit",
    "state",
    "n_pulses",
    "shots",
    "fidelity",
    "p00",
    "p01",
    "p10",
    "p11",
    "uhlmann_vs_free",
)

REPORT_COLUMNS = ("sequence", "N", "tau", "mean_fidelity", "ci_halfwidth")

MANIFEST_SCHEMA = "ddsim/run-manifest/v1"


class ResultError(ValueError):
    """Malformed records, manifests, or result directories."""


@dataclass(frozen=True)
class Record:
    """One sweep cell: empirical fidelity or a Bell outcome distribution."""

    sequence: str
    tau: int
    qubit: str
    state: str
    n_pulses: int
    shots: int
    fidelity: float | None = None
    p00: float | None = None
    p01: float | None = None
    p10: float | None = None
    p11: float | None = None
    uhlmann_vs_free: float | None = None

    def key(self) -> tuple:
        return (self.sequence, self.tau, self.qubit, self.state, self.n_pulses)


@dataclass
class ResultSet:
    records: list[Record]
    manifest: dict = field(default_factory=dict)

    def validate(self) -> None:
        seen = set()
        for r in self.records:
            k = r.key()
            if k in seen:
                raise ResultError(f"duplicate sweep cell {k}")
            seen.add(k)

    def sequences(self) -> list[str]:
        return sorted({r.sequence for r in self.records})


def _fixture_checksums() -> dict[str, str]:
    from importlib import resources

    sums = {}
    root = resources.files("ddsim.data")
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".csv"):
            sums[entry.name] = hashlib.sha256(entry.read_bytes()).hexdigest()
    return sums


def build_manifest(spec_dict: dict, seed: int) -> dict:
    from . import __version__

    return {
        "schema": MANIFEST_SCHEMA,
        "suite_version": __version__,
        "seed": seed,
        "spec": spec_dict,
        "fixture_checksums": _fixture_checksums(),
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def records_to_csv(records: list[Record]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RECORD_COLUMNS)
    for r in records:
        writer.writerow([_fmt(getattr(r, col)) for col in RECORD_COLUMNS])
    return out.getvalue()


def records_from_csv(text: str) -> list[Record]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != RECORD_COLUMNS:
        raise ResultError(f"records.csv must have columns {','.join(RECORD_COLUMNS)}")
    records = []
    for row in reader:
        def fnum(key):
            return float(row[key]) if row[key] not in ("", None) else None

        records.append(
            Record(
                sequence=row["sequence"],
                tau=int(row["tau"]),
                qubit=row["qubit"],
                state=row["state"],
                n_pulses=int(row["n_pulses"]),
                shots=int(row["shots"]),
                fidelity=fnum("fidelity"),
                p00=fnum("p00"),
                p01=fnum("p01"),
                p10=fnum("p10"),
                p11=fnum("p11"),
                uhlmann_vs_free=fnum("uhlmann_vs_free"),
            )
        )
    return records


def write_result_dir(result: ResultSet, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "records.csv"), "w", encoding="utf-8", newline="") as f:
        f.write(records_to_csv(result.records))
    manifest = dict(result.manifest)
    manifest["record_count"] = len(result.records)
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


def read_result_dir(path: str) -> ResultSet:
    records_path = os.path.join(path, "records.csv")
    manifest_path = os.path.join(path, "manifest.json")
    if not os.path.exists(records_path):
        raise ResultError(f"no records.csv under {path!r}")
    with open(records_path, encoding="utf-8") as f:
        records = records_from_csv(f.read())
    manifest = {}
    if os.path.exists(manifest_path):
        with open(manifest_path, encoding="utf-8") as f:
            manifest = json.load(f)
    return ResultSet(records=records, manifest=manifest)


# --------------------------------------------------------------------------
# Plot-ready aggregation
# --------------------------------------------------------------------------

def _is_type1_state(state: str) -> bool:
    return state.startswith("theta")


def _aggregate_labels(r: Record) -> list[tuple[str, float]]:
    """(aggregate label, sample value) pairs contributed by one record.

    Single-qubit fidelity records aggregate over qubits and states per
    (sequence, N, tau). State-angle sweeps keep the state in the label
    (``FREE@theta03``) and Bell runs expand outcomes (``XY4@phi+:p00`` ...),
    so every figure-style series stays plottable from the report columns.
    """
    if r.p00 is not None:
        return [
            (f"{r.sequence}@{r.state}:{p}", getattr(r, p))
            for p in ("p00", "p01", "p10", "p11")
        ]
    if _is_type1_state(r.state):
        return [(f"{r.sequence}@{r.state}", r.fidelity)]
    return [(r.sequence, r.fidelity)]


def aggregate_samples(records: list[Record]) -> dict[tuple[str, int, int], list[float]]:
    """Group record values by (aggregate label, N, tau), canonically ordered."""
    groups: dict[tuple[str, int, int], list[float]] = {}
    for r in records:
        for label, value in _aggregate_labels(r):
            groups.setdefault((label, r.n_pulses, r.tau), []).append(value)
    return dict(sorted(groups.items()))


def _stable_token(label: str) -> int:
    return int(hashlib.sha256(label.encode("utf-8")).hexdigest()[:8], 16)


def report_csv(records: list[Record], resamples: int = 5000, seed: int = 0) -> str:
    """Aggregate records into plot-ready rows with bootstrap error bars."""
    import numpy as np

    from .analysis import bootstrap

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for (label, n, tau), samples in aggregate_samples(records).items():
        rng = np.random.default_rng(
            np.random.SeedSequence((seed, _stable_token(label), n, tau))
        )
        boot = bootstrap(samples, resamples=resamples, rng=rng)
        halfwidth = (boot.ci_high - boot.ci_low) / 2.0
        writer.writerow([label, n, tau, repr(float(np.mean(samples))), repr(halfwidth)])
    return out.getvalue()
