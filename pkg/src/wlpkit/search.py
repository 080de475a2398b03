"""Seeded search for WLP failures among pfaffian ideals of random 5x5 skew matrices.

Each trial is a pure function of ``(field, seed, trial_index)``: the matrix is
drawn from ``random.Random(seed ^ trial_index)``, so any record can be replayed
on its own.  Workers compute trials independently and a single writer appends
the failure records to a JSONL file in trial order.
"""

from __future__ import annotations

import json
import multiprocessing
import random
import time
from dataclasses import asdict, dataclass, field as dc_field

from .errors import WlpkitError
from .exactfield import FieldSpec, parse_field
from .gorenstein import SkewPolyMatrix, certify_gorenstein, pfaffian_ideal
from .gradedquot import hvector
from .lefschetz import general_jordan, wlp_check

DEFAULT_SEED = 0xC0FFEE
TARGET_HVECTOR = (1, 3, 6, 6, 3, 1)
_CHUNK = 64


@dataclass
class SearchRecord:
    trial_index: int
    seed: int
    field: str
    matrix: str
    hvector: list
    wlp_verdict: str
    certificate: dict
    jordan_general: list
    timestamp: float = None

    def to_json(self) -> str:
        d = asdict(self)
        if d["timestamp"] is None:
            del d["timestamp"]
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> SearchRecord:
        return cls(**json.loads(line))


@dataclass
class SearchSummary:
    field: str
    seed: int
    trials: int = 0
    gorenstein_target: int = 0
    failures: int = 0
    rejected: dict = dc_field(default_factory=dict)
    signatures: dict = dc_field(default_factory=dict)

    @property
    def yield_rate(self):
        return self.gorenstein_target / self.trials if self.trials else 0.0

    def to_dict(self):
        d = asdict(self)
        d["yield"] = self.yield_rate
        return d


def trial_seed(seed: int, trial_index: int) -> int:
    return seed ^ trial_index


def run_trial(field: FieldSpec, seed: int, trial_index: int, record_all: bool = False):
    """Run one trial; returns (status, record or None).

    ``status`` is ``"fails"``, ``"holds"`` or the name of the filter that
    rejected the matrix.
    """
    rng = random.Random(trial_seed(seed, trial_index))
    M = SkewPolyMatrix.random_be(field, rng)
    return classify_matrix(M, seed, trial_index, record_all)


def classify_matrix(M: SkewPolyMatrix, seed: int = None, trial_index: int = None, record_all: bool = False):
    """Filter and test one matrix exactly as a search trial does.

    A record is produced for every WLP failure, and with ``record_all`` also
    for instances that have the WLP (their certificate names the witness form
    and ``jordan_general`` is left empty).
    """
    field = M.field
    try:
        I = pfaffian_ideal(M)
    except WlpkitError:
        return "inhomogeneous", None
    if not I.generators:
        return "zero_pfaffians", None
    try:
        h = hvector(I, probe_bound=len(TARGET_HVECTOR) + 2)
    except WlpkitError:
        return "not_artinian", None
    if tuple(h.values) != TARGET_HVECTOR:
        return "wrong_hvector", None
    if not certify_gorenstein(I).certified:
        return "not_gorenstein", None
    report = wlp_check(I, strategy="exhaustive")
    if report.verdict != "fails":
        if not record_all:
            return "holds", None
        return "holds", SearchRecord(
            trial_index=trial_index,
            seed=seed,
            field=str(field),
            matrix=M.to_text(),
            hvector=list(h.values),
            wlp_verdict=report.verdict,
            certificate={"witness": str(report.witness)},
            jordan_general=[],
        )
    parts, _ = general_jordan(I)
    record = SearchRecord(
        trial_index=trial_index,
        seed=seed,
        field=str(field),
        matrix=M.to_text(),
        hvector=list(h.values),
        wlp_verdict=report.verdict,
        certificate=report.certificate,
        jordan_general=list(parts),
    )
    return "fails", record


def _worker(args):
    field_name, seed, trial_index, record_all = args
    return trial_index, run_trial(parse_field(field_name), seed, trial_index, record_all)


def iter_trials(field: FieldSpec, seed: int, trials: int, workers: int = 1, record_all: bool = False):
    """Yield ``(trial_index, (status, record))`` in trial order."""
    jobs = ((str(field), seed, t, record_all) for t in range(trials))
    if workers <= 1:
        for job in jobs:
            yield _worker(job)
        return
    with multiprocessing.Pool(workers) as pool:
        yield from pool.imap(_worker, jobs, chunksize=_CHUNK)


def search(field: FieldSpec, seed: int = DEFAULT_SEED, trials: int = 1000, workers: int = 1,
           out_path=None, timestamps: bool = False, progress=None, record_all: bool = False) -> SearchSummary:
    """Run the search, appending every failure record to ``out_path`` (JSONL).

    With ``record_all`` every certified instance is written, not only failures.

    The output file is created (truncated) even when no failure is found, and
    flushed after each record, so an interrupted run leaves a valid prefix.
    """
    if not field.is_finite:
        raise ValueError("the search needs a finite field")
    if trials < 0 or workers < 1:
        raise ValueError("trials must be >= 0 and workers >= 1")
    summary = SearchSummary(field=str(field), seed=seed)
    sink = open(out_path, "w", encoding="utf-8") if out_path is not None else None
    try:
        for trial_index, (status, record) in iter_trials(field, seed, trials, workers, record_all):
            summary.trials += 1
            if status in ("holds", "fails"):
                summary.gorenstein_target += 1
            else:
                summary.rejected[status] = summary.rejected.get(status, 0) + 1
            if status == "fails":
                summary.failures += 1
                key = ",".join(map(str, record.jordan_general))
                summary.signatures[key] = summary.signatures.get(key, 0) + 1
            if record is not None:
                if timestamps:
                    record.timestamp = time.time()
                if sink is not None:
                    sink.write(record.to_json() + "\n")
                    sink.flush()
            if progress is not None:
                progress(trial_index, status)
    finally:
        if sink is not None:
            sink.close()
    return summary


def read_records(path):
    with open(path, encoding="utf-8") as fh:
        return [SearchRecord.from_json(line) for line in fh if line.strip()]
