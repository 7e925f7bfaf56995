"""Normalized flight time across the storage-fraction design space.

Storage fraction is ``phi = m_b / (m_d + m_b)``. Flight times are divided by
the continuous-staging limit ``2 e_b c_T / sqrt(m_d)``, so ``e_b`` and ``c_T``
cancel and every value depends on ``phi`` and the staging configuration only.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np
from scipy import optimize as _sciopt

from .errors import DomainError, StagingError
from .model import VehicleParams, equal_objective, ic_fraction
from .optimize import optimal_partition

KINDS = ("equal", "optimal", "continuous")
CSV_HEADER = ("phi", "stages", "kind", "normalized_time")
GAIN_HEADER = ("stages", "peak_equal", "peak_optimal", "gain_percent", "phi_equal", "phi_optimal")
DEFAULT_STAGE_COUNTS = (1, 2, 3, 5, 10)
PEAK_PHI_TOL = 1e-8


def default_fractions(n_points=512, lo=0.001, hi=0.999):
    return tuple(np.linspace(lo, hi, n_points).tolist())


@dataclass(frozen=True)
class SweepSpec:
    storage_fractions: Sequence[float] = field(default_factory=default_fractions)
    stage_counts: Sequence[int] = DEFAULT_STAGE_COUNTS
    include_optimal: bool = True
    include_continuous: bool = True
    reference_dry_mass: float = 1.0

    def __post_init__(self):
        fracs = tuple(float(p) for p in self.storage_fractions)
        for p in fracs:
            _check_phi(p)
        counts = tuple(int(n) for n in self.stage_counts)
        if any(n < 1 for n in counts):
            raise DomainError("stage counts must all be >= 1")
        if not self.reference_dry_mass > 0:
            raise DomainError("reference_dry_mass must be positive")
        object.__setattr__(self, "storage_fractions", fracs)
        object.__setattr__(self, "stage_counts", counts)


class SweepRow(NamedTuple):
    phi: float
    stages: Union[int, str]
    kind: str
    normalized_time: float


class GainRow(NamedTuple):
    stages: int
    peak_equal: float
    peak_optimal: float
    gain_percent: float
    phi_equal: float
    phi_optimal: float


@dataclass(frozen=True)
class SweepTable:
    rows: tuple

    def select(self, kind, stages=None):
        return [r for r in self.rows if r.kind == kind and (stages is None or r.stages == stages)]

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow([repr(r.phi), r.stages, r.kind, repr(r.normalized_time)])

    def to_records(self):
        return [r._asdict() for r in self.rows]


def _check_phi(phi):
    if not (0.0 < phi < 1.0):
        raise DomainError(f"storage fraction must lie strictly inside (0, 1), got {phi!r}")


def normalized_time(phi, stages, kind, dry_mass=1.0) -> float:
    """Flight time at storage fraction ``phi`` divided by the continuous limit."""
    _check_phi(phi)
    mb = phi / (1.0 - phi) * dry_mass
    if kind == "continuous":
        return ic_fraction(dry_mass, mb)
    half_root = 0.5 * math.sqrt(dry_mass)
    if kind == "equal":
        return half_root * equal_objective(dry_mass, mb, stages)
    if kind == "optimal":
        # only the dry mass matters to the partition; c_p is a placeholder
        return half_root * optimal_partition(VehicleParams(dry_mass, 1.0), mb, stages).objective
    raise DomainError(f"unknown staging kind {kind!r}")


def run_sweep(spec: SweepSpec = None) -> SweepTable:
    spec = spec or SweepSpec()
    md = spec.reference_dry_mass
    rows = []
    for kind in KINDS:
        if kind == "optimal" and not spec.include_optimal:
            continue
        if kind == "continuous":
            if spec.include_continuous:
                rows += [SweepRow(p, "continuous", kind, normalized_time(p, None, kind, md)) for p in spec.storage_fractions]
            continue
        for n in sorted(set(spec.stage_counts)):
            rows += [SweepRow(p, n, kind, normalized_time(p, n, kind, md)) for p in spec.storage_fractions]
    order = {k: i for i, k in enumerate(KINDS)}
    rows.sort(key=lambda r: (order[r.kind], math.inf if r.stages == "continuous" else r.stages, r.phi))
    return SweepTable(tuple(rows))


def peak(stages, kind, fractions=None, tol=PEAK_PHI_TOL):
    """Locate ``(phi, normalized_time)`` at the maximum of one curve.

    The coarse grid maximum and its neighbours bracket a golden-section search.
    Raises if the coarse samples are not unimodal.
    """
    fracs = np.asarray(fractions if fractions is not None else default_fractions(), dtype=float)
    values = np.array([normalized_time(p, stages, kind) for p in fracs])
    steps = np.sign(np.diff(values))
    steps = steps[steps != 0]
    if np.any((steps[:-1] < 0) & (steps[1:] > 0)):
        raise StagingError(f"{kind} curve for N={stages} is not unimodal on the sampled grid")
    i = int(np.argmax(values))
    if i == 0 or i == fracs.size - 1:
        raise StagingError(f"{kind} curve for N={stages} peaks at the edge of the sampled grid")
    brack = (fracs[i - 1], fracs[i], fracs[i + 1])
    # golden stops when the bracket width is below tol * (|x1| + |x2|) ~ 2 tol * phi
    phi = float(_sciopt.golden(lambda p: -normalized_time(p, stages, kind), brack=brack, tol=tol / 2.0))
    return phi, normalized_time(phi, stages, kind)


def gain_table(stage_counts, fractions=None):
    """Peak optimal vs. peak equal staging for each N >= 2."""
    rows = []
    for n in stage_counts:
        if int(n) != n or n < 2:
            raise DomainError(f"gain table needs N >= 2, got {n!r}")
        n = int(n)
        phi_e, peak_e = peak(n, "equal", fractions)
        phi_o, peak_o = peak(n, "optimal", fractions)
        rows.append(GainRow(n, peak_e, peak_o, 100.0 * (peak_o / peak_e - 1.0), phi_e, phi_o))
    return rows


def write_gains_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(GAIN_HEADER)
    for r in rows:
        writer.writerow([r.stages] + [repr(v) for v in r[1:]])
