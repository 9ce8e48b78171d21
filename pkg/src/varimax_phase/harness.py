"""Monte Carlo sweeps over (n, k, law) and their persisted results."""

from __future__ import annotations

import csv
import io
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction
from itertools import groupby
from pathlib import Path

from .adversarial import build_witness, witness_beats_truth
from .datagen import KurtosisLaw, make_instance
from .errors import ParameterError, SingularityError, VarimaxPhaseError
from .metrics import rotation_distance
from .seeding import derive_seed
from .varimax import objective, optimize

log = logging.getLogger(__name__)

CONFIG_KEYS = ("n_list", "k_list", "laws", "trials", "delta", "restarts", "base_seed",
               "run_witness", "include_truth_restart")
WITNESS_RESAMPLES = 100


@dataclass(frozen=True)
class SweepConfig:
    n_list: tuple
    k_list: tuple
    law_list: tuple
    trials: int = 1
    delta: float = 0.5
    restarts: int = 10
    base_seed: int = 0
    include_truth_restart: bool = False
    run_witness: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "k_list", tuple(int(k) for k in self.k_list))
        laws = tuple(l if isinstance(l, KurtosisLaw) else KurtosisLaw.parse(l) for l in self.law_list)
        object.__setattr__(self, "law_list", laws)
        if not self.n_list or not self.k_list or not self.law_list:
            raise ParameterError("n_list, k_list and laws must be non-empty")
        if any(v < 1 for v in self.n_list + self.k_list):
            raise ParameterError("n and k values must be positive")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not 0 < self.delta <= 2:
            raise ParameterError("delta must lie in (0, 2]")
        if self.restarts < 1:
            raise ParameterError("restarts must be >= 1")

    def cells(self):
        """Every (n, k, law) with n > k; cells with n <= k are logged and skipped."""
        out = []
        for law in self.law_list:
            for k in self.k_list:
                for n in self.n_list:
                    if n <= k:
                        log.info("skipping cell n=%d k=%d: need n > k", n, k)
                        continue
                    out.append((n, k, law))
        return out


def _parse_value(raw):
    raw = raw.strip()
    if raw.startswith("["):
        if not raw.endswith("]"):
            raise ParameterError(f"unterminated list: {raw!r}")
        return [tok.strip() for tok in raw[1:-1].split(",") if tok.strip()]
    return raw


def _parse_bool(raw, key):
    low = raw.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ParameterError(f"{key}: expected true/false, got {raw!r}")


def parse_config(text: str, base_seed=None) -> SweepConfig:
    """Parse ``key = value`` lines; lists are ``[a, b, c]``; ``#`` starts a comment.

    ``base_seed`` (if given) overrides the file's value.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip()
        if not sep:
            raise ParameterError(f"line {lineno}: expected key = value")
        if key not in CONFIG_KEYS:
            raise ParameterError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ParameterError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(raw)

    missing = [k for k in ("n_list", "k_list", "laws") if k not in values]
    if missing:
        raise ParameterError(f"config missing keys: {', '.join(missing)}")
    try:
        for key in ("n_list", "k_list", "laws"):
            if not isinstance(values[key], list):
                values[key] = [values[key]]
        kwargs = dict(
            n_list=[int(v) for v in values["n_list"]],
            k_list=[int(v) for v in values["k_list"]],
            law_list=[KurtosisLaw.parse(v) for v in values["laws"]],
        )
        for key, conv in (("trials", int), ("delta", float), ("restarts", int), ("base_seed", int)):
            if key in values:
                kwargs[key] = conv(values[key])
        for key in ("run_witness", "include_truth_restart"):
            if key in values:
                kwargs[key] = _parse_bool(values[key], key)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"bad config value: {exc}") from exc
    if base_seed is not None:
        kwargs["base_seed"] = int(base_seed)
    return SweepConfig(**kwargs)


def load_config(path, base_seed=None) -> SweepConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), base_seed=base_seed)


@dataclass
class TrialRecord:
    n: int
    k: int
    kappa: float
    family: str
    trial_index: int
    seed: int
    dist: float
    objective: float
    v_true: float
    iterations: int
    restarts_used: int
    success: bool
    witness_beats: bool | None = None
    d1: float | None = None
    d2: float | None = None
    wall_time_ms: float | None = None
    error: str = ""

    def sort_key(self):
        return (self.family, self.kappa, self.k, self.n, self.trial_index)


RECORD_FIELDS = tuple(f.name for f in fields(TrialRecord))


def trial_seed(base_seed, n, k, law, trial_index):
    return derive_seed(base_seed, "trial", n, k, str(law), trial_index)


def sample_witness_instance(n, k, law, seed):
    """Instance plus witness; rank-deficient ``Z1`` triggers a deterministic resample."""
    for attempt in range(WITNESS_RESAMPLES):
        s = seed if attempt == 0 else derive_seed(seed, "resample", attempt)
        inst = make_instance(n, k, law, s)
        try:
            return inst, build_witness(inst)
        except SingularityError:
            continue
    raise SingularityError(f"first ceil(k/2) rows rank deficient in {WITNESS_RESAMPLES} draws")


def run_trial(n, k, law, delta=0.5, restarts=10, seed=0, trial_index=0,
              run_witness=False, include_truth_restart=False) -> TrialRecord:
    """One instance, one Varimax fit, its distance to the truth and optional witness check.

    Numerical failures become a record with ``error`` set and ``success=False``.
    """
    if isinstance(law, str):
        law = KurtosisLaw.parse(law)
    if n <= k:
        raise ParameterError(f"need n > k, got n={n}, k={k}")
    t0 = time.perf_counter()
    rec = TrialRecord(n=n, k=k, kappa=law.kappa, family=law.family, trial_index=trial_index,
                      seed=seed, dist=math.nan, objective=math.nan, v_true=math.nan,
                      iterations=0, restarts_used=0, success=False)
    try:
        witness = None
        if run_witness and k >= 2:
            inst, witness = sample_witness_instance(n, k, law, seed)
        else:
            inst = make_instance(n, k, law, seed)
        extra = (inst.r_star,) if include_truth_restart else ()
        sol = optimize(inst.z_hat, restarts=restarts, seed=derive_seed(seed, "optimize"),
                       extra_starts=extra)
        rec.dist = rotation_distance(inst.r_star, sol.r_hat).dist
        rec.objective = sol.objective
        rec.v_true = objective(inst.z_hat, inst.r_star)
        rec.iterations = sol.best_iterations
        rec.restarts_used = sol.restarts_used
        rec.success = rec.dist < delta
        if witness is not None:
            _, _, beats = witness_beats_truth(inst, witness)
            rec.witness_beats, rec.d1, rec.d2 = beats, witness.d1, witness.d2
    except (VarimaxPhaseError, ArithmeticError) as exc:
        rec.error = type(exc).__name__
        rec.success = False
    rec.wall_time_ms = (time.perf_counter() - t0) * 1e3
    return rec


def _trial_task(args):
    n, k, law, cfg, t = args
    return run_trial(n, k, law, delta=cfg.delta, restarts=cfg.restarts,
                     seed=trial_seed(cfg.base_seed, n, k, law, t), trial_index=t,
                     run_witness=cfg.run_witness, include_truth_restart=cfg.include_truth_restart)


def run_sweep(cfg: SweepConfig, workers: int = 1) -> list:
    """Run every cell x trial; the sorted output does not depend on ``workers``."""
    tasks = [(n, k, law, cfg, t) for n, k, law in cfg.cells() for t in range(cfg.trials)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_trial_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        records = [_trial_task(t) for t in tasks]
    records.sort(key=TrialRecord.sort_key)
    for key, grp in groupby(records, key=lambda r: (r.family, r.kappa, r.k, r.n)):
        grp = list(grp)
        log.info("cell family=%s kappa=%r k=%d n=%d: %d/%d successes", *key,
                 sum(r.success for r in grp), len(grp))
    return records


# -- persistence ---------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_opt_float(s):
    return None if s == "" else float(s)


def _parse_opt_bool(s):
    return None if s == "" else s == "true"


_READERS = {
    "n": int, "k": int, "kappa": float, "family": str, "trial_index": int, "seed": int,
    "dist": float, "objective": float, "v_true": float, "iterations": int,
    "restarts_used": int, "success": lambda s: s == "true", "witness_beats": _parse_opt_bool,
    "d1": _parse_opt_float, "d2": _parse_opt_float, "wall_time_ms": _parse_opt_float,
    "error": str,
}


def records_to_csv(records, include_timing=False) -> str:
    """Serialize records; floats use ``repr`` so reading back is lossless.

    Wall-clock time is left blank unless ``include_timing`` so that the file is
    a pure function of the config.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_FIELDS)
    for r in records:
        row = []
        for name in RECORD_FIELDS:
            v = getattr(r, name)
            if name == "wall_time_ms" and not include_timing:
                v = None
            row.append(_fmt(v))
        w.writerow(row)
    return buf.getvalue()


def records_from_csv(text: str) -> list:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or tuple(header) != RECORD_FIELDS:
        raise ParameterError(f"unexpected records header: {header}")
    return [TrialRecord(**{name: _READERS[name](v) for name, v in zip(header, row)}) for row in rows]


def write_records(path, records, include_timing=False):
    Path(path).write_text(records_to_csv(records, include_timing), encoding="utf-8")


def read_records(path):
    return records_from_csv(Path(path).read_text(encoding="utf-8"))


# -- summary -------------------------------------------------------------------

@dataclass(frozen=True)
class CellSummary:
    n: int
    k: int
    kappa: float
    family: str
    trials: int
    successes: int
    success_rate: Fraction
    success_se: float
    median_dist: float
    witness_beat_rate: float | None = None
    errors: int = 0

    @property
    def law_key(self):
        return (self.family, self.kappa)


SUMMARY_FIELDS = tuple(f.name for f in fields(CellSummary))


def summarize(records) -> list:
    """Per-cell success rate (exact), its binomial standard error, median distance."""
    records = sorted(records, key=TrialRecord.sort_key)
    if not records:
        raise ParameterError("cannot summarize an empty record list")
    out = []
    for (family, kappa, k, n), grp in groupby(records, key=lambda r: (r.family, r.kappa, r.k, r.n)):
        grp = list(grp)
        trials = len(grp)
        successes = sum(r.success for r in grp)
        rate = Fraction(successes, trials)
        p = float(rate)
        dists = [r.dist for r in grp if not math.isnan(r.dist)]
        beats = [r.witness_beats for r in grp if r.witness_beats is not None]
        out.append(CellSummary(
            n=n, k=k, kappa=kappa, family=family, trials=trials, successes=successes,
            success_rate=rate, success_se=math.sqrt(p * (1 - p) / trials),
            median_dist=statistics.median(dists) if dists else math.nan,
            witness_beat_rate=sum(beats) / len(beats) if beats else None,
            errors=sum(1 for r in grp if r.error),
        ))
    return out


def summary_to_csv(summary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_FIELDS)
    for s in summary:
        row = []
        for name in SUMMARY_FIELDS:
            v = getattr(s, name)
            row.append(repr(float(v)) if isinstance(v, Fraction) else _fmt(v))
        w.writerow(row)
    return buf.getvalue()


def write_outputs(out_dir, records, include_timing=False):
    """Write ``records.csv``, ``summary.csv`` and ``phase.svg`` under ``out_dir``."""
    from .plotting import render_heatmap

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = summarize(records)
    write_records(out / "records.csv", records, include_timing)
    (out / "summary.csv").write_text(summary_to_csv(summary), encoding="utf-8")
    (out / "phase.svg").write_text(render_heatmap(summary), encoding="utf-8")
    return summary
