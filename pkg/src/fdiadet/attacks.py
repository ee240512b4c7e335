"""Falsification of measurement series: deductive, additive and combined injections."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fdiadet.timeseries import TimeSeries

ATTACK_KINDS = ("deductive", "additive", "combined")

# Covers one ulp of rounding in the injected product when checking the bound.
_STEALTH_SLACK = 1e-12


@dataclass(frozen=True)
class AttackSpec:
    """What to falsify and by how much.

    ``delta`` is the manipulation magnitude as a fraction of the true value
    (0.05 keeps the attack within the 5% stealth envelope). Segments are given
    explicitly as (start, length) pairs, or drawn non-overlapping at random
    via (segment_count, segment_length, placement_seed). With
    ``per_point_uniform`` each attacked point draws its own magnitude
    uniformly from (0, delta] instead of using the constant delta.
    """

    kind: str
    delta: float = 0.05
    segments: tuple[tuple[int, int], ...] = ()
    segment_count: int = 0
    segment_length: int = 0
    placement_seed: int = 0
    per_point_uniform: bool = False
    draw_seed: int = 0

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise ValueError(f"unknown attack kind {self.kind!r}; expected one of {ATTACK_KINDS}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        object.__setattr__(self, "segments", tuple((int(s), int(l)) for s, l in self.segments))

    def resolve_segments(self, series_length: int) -> tuple[tuple[int, int], ...]:
        """Explicit segments, or a seeded non-overlapping random placement."""
        if self.segments:
            segs = tuple(sorted(self.segments))
        elif self.segment_count > 0:
            segs = _place_segments(series_length, self.segment_count,
                                   self.segment_length, self.placement_seed)
        else:
            return ()
        _check_segments(segs, series_length)
        return segs


@dataclass(frozen=True)
class AttackedSeries:
    """Manipulated series plus per-point ground truth. Unattacked points are untouched."""

    series: TimeSeries
    labels: np.ndarray
    spec: AttackSpec

    @property
    def values(self) -> np.ndarray:
        return self.series.values


def _check_segments(segments, series_length: int) -> None:
    prev_end = -1
    for start, length in segments:
        if length < 1:
            raise ValueError(f"segment {(start, length)} has non-positive length")
        if start < 0 or start + length > series_length:
            raise ValueError(f"segment {(start, length)} falls outside series of length {series_length}")
        if start <= prev_end:
            raise ValueError(f"segment starting at {start} overlaps the previous one")
        prev_end = start + length - 1


def _place_segments(series_length: int, count: int, length: int, seed: int) -> tuple[tuple[int, int], ...]:
    """Seeded random placement of non-overlapping equal-length segments."""
    if count * length > series_length:
        raise ValueError(f"{count} segments of {length} do not fit in {series_length} samples")
    rng = np.random.default_rng(seed)
    # Draw the slack distribution between segments, then lay segments out in order.
    slack = series_length - count * length
    cuts = np.sort(rng.integers(0, slack + 1, size=count))
    starts = [int(cuts[i]) + i * length for i in range(count)]
    return tuple((s, length) for s in starts)


def _magnitudes(spec: AttackSpec, n_points: int) -> np.ndarray:
    if spec.per_point_uniform:
        rng = np.random.default_rng(spec.draw_seed)
        # Uniform over (0, delta]: flip the half-open interval of rng.uniform.
        return spec.delta - rng.uniform(0.0, spec.delta, size=n_points)
    return np.full(n_points, spec.delta)


def _inject(series: TimeSeries, spec: AttackSpec, signs: np.ndarray,
            indices: np.ndarray) -> AttackedSeries:
    values = series.values.copy()
    labels = np.zeros(len(series), dtype=bool)
    if len(indices):
        deltas = _magnitudes(spec, len(indices))
        values[indices] = series.values[indices] * (1.0 + signs * deltas)
        labels[indices] = True
    return AttackedSeries(series=series.with_values(values), labels=labels, spec=spec)


def _attacked_indices(series: TimeSeries, spec: AttackSpec) -> np.ndarray:
    segments = spec.resolve_segments(len(series))
    if not segments:
        return np.array([], dtype=np.int64)
    return np.concatenate([np.arange(s, s + l, dtype=np.int64) for s, l in segments])


def inject_deductive(series: TimeSeries, spec: AttackSpec) -> AttackedSeries:
    """Report attacked points below truth: value * (1 - delta)."""
    if spec.kind != "deductive":
        raise ValueError(f"spec kind is {spec.kind!r}, expected 'deductive'")
    idx = _attacked_indices(series, spec)
    return _inject(series, spec, np.full(len(idx), -1.0), idx)


def inject_additive(series: TimeSeries, spec: AttackSpec) -> AttackedSeries:
    """Report attacked points above truth: value * (1 + delta)."""
    if spec.kind != "additive":
        raise ValueError(f"spec kind is {spec.kind!r}, expected 'additive'")
    idx = _attacked_indices(series, spec)
    return _inject(series, spec, np.full(len(idx), 1.0), idx)


def inject_combined(series: TimeSeries, spec: AttackSpec) -> AttackedSeries:
    """Half additive, half deductive, walking attacked points in segment order.

    The first ceil(n/2) attacked points (earlier segments first) receive the
    additive manipulation, the remainder the deductive one, so an odd count
    gives additive the extra point.
    """
    if spec.kind != "combined":
        raise ValueError(f"spec kind is {spec.kind!r}, expected 'combined'")
    idx = _attacked_indices(series, spec)
    signs = np.full(len(idx), -1.0)
    n_additive = (len(idx) + 1) // 2
    signs[:n_additive] = 1.0
    return _inject(series, spec, signs, idx)


def inject(series: TimeSeries, spec: AttackSpec) -> AttackedSeries:
    """Dispatch on spec.kind."""
    fn = {"deductive": inject_deductive, "additive": inject_additive,
          "combined": inject_combined}[spec.kind]
    return fn(series, spec)


def verify_stealth(source: TimeSeries, attacked: AttackedSeries) -> bool:
    """True iff labeled points respect the relative bound and the rest are untouched."""
    if len(source) != len(attacked.series):
        raise ValueError(f"length mismatch: source {len(source)} vs attacked {len(attacked.series)}")
    src = source.values
    att = attacked.series.values
    labels = attacked.labels
    clean_ok = np.array_equal(src[~labels], att[~labels])
    bound = attacked.spec.delta * np.abs(src[labels]) * (1.0 + _STEALTH_SLACK) + _STEALTH_SLACK
    attacked_ok = bool(np.all(np.abs(att[labels] - src[labels]) <= bound))
    return clean_ok and attacked_ok
