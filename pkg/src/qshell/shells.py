"""Energy-ordered level schemes, shell gaps and magic numbers.

Levels are sorted by energy (ties broken by n then l), occupancies are
accumulated, and a gap between adjacent levels larger than the primary
threshold closes a shell: the cumulative count at the closing level is a
magic number.  Gaps in the secondary band are reported as weaker
closures.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .spectrum import Level, ModelParameters, energy, enumerate_levels

__all__ = [
    "MagicGrade",
    "MagicRecord",
    "LevelScheme",
    "InsufficientNMaxError",
    "build_scheme",
    "detect_shells",
    "render_table",
]

DEFAULT_PRIMARY_GAP = 0.39
DEFAULT_SECONDARY_GAP = 0.30
DEFAULT_COUNT_LIMIT = 1520


class InsufficientNMaxError(RuntimeError):
    """The enumeration bound n_max cannot guarantee a complete scheme."""


class MagicGrade(Enum):
    PRIMARY = "primary"
    SECONDARY = "secondary"


@dataclass(frozen=True)
class MagicRecord:
    """A shell closure after a level: its gap, cumulative count and grade."""

    after_level: Level
    gap: float
    count: int
    grade: MagicGrade

    def __post_init__(self) -> None:
        if self.gap <= 0:
            raise ValueError(f"gap must be positive, got {self.gap!r}")
        if self.count < 1:
            raise ValueError(f"count must be positive, got {self.count!r}")


@dataclass(frozen=True)
class LevelScheme:
    """Levels in ascending energy order with running occupancy totals."""

    levels: tuple[Level, ...]
    cumulative: tuple[int, ...]
    params: ModelParameters

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValueError("a level scheme cannot be empty")
        if len(self.levels) != len(self.cumulative):
            raise ValueError("levels and cumulative must have equal length")
        total = 0
        previous = None
        for lev, cum in zip(self.levels, self.cumulative):
            if previous is not None and lev.energy < previous:
                raise ValueError("level energies must be non-decreasing")
            previous = lev.energy
            total += lev.degeneracy
            if cum != total:
                raise ValueError(f"cumulative total {cum} != running sum {total}")


def _sort_key(level: Level) -> tuple[float, int, int]:
    return (level.energy, level.n, level.l)


def _truncated(p: ModelParameters, count_limit: int) -> tuple[list[Level], list[int]]:
    kept = []
    totals = []
    running = 0
    for lev in sorted(enumerate_levels(p), key=_sort_key):
        if running + lev.degeneracy > count_limit:
            break
        running += lev.degeneracy
        kept.append(lev)
        totals.append(running)
    return kept, totals


def _is_complete(p: ModelParameters, last_energy: float) -> bool:
    # The lowest level of shell m is (m, m); once that clears the truncation
    # energy, no omitted shell can reach into the kept range.
    return energy(p.n_max + 1, p.n_max + 1, p) > last_energy


def build_scheme(p: ModelParameters, count_limit: int = DEFAULT_COUNT_LIMIT) -> LevelScheme:
    """Sort, accumulate and truncate the level scheme at count_limit.

    Levels are kept while the running occupancy stays within count_limit,
    so a total exactly equal to the limit is still included.  Raises
    InsufficientNMaxError when shells above n_max could still reach below
    the truncation energy, naming an n_max that would be safe.
    """
    if count_limit < 2:
        raise ValueError(f"count_limit must be >= 2, got {count_limit!r}")
    kept, totals = _truncated(p, count_limit)
    if not _is_complete(p, kept[-1].energy):
        required = p.n_max + 1
        while True:
            candidate = ModelParameters(p.deformation, p.hbar_omega0, required)
            partial, _ = _truncated(candidate, count_limit)
            if _is_complete(candidate, partial[-1].energy):
                break
            required += 1
        raise InsufficientNMaxError(
            f"n_max={p.n_max} is too small for count_limit={count_limit}: "
            f"shell {p.n_max + 1} starts below the truncation energy "
            f"{kept[-1].energy:.6f}; use n_max >= {required}"
        )
    return LevelScheme(tuple(kept), tuple(totals), p)


def detect_shells(
    s: LevelScheme,
    primary_gap: float = DEFAULT_PRIMARY_GAP,
    secondary_gap: float = DEFAULT_SECONDARY_GAP,
) -> list[MagicRecord]:
    """Scan adjacent-level gaps and grade them against the two thresholds.

    Strict comparisons: a gap qualifies as primary when gap > primary_gap,
    as secondary when secondary_gap < gap <= primary_gap.
    """
    if not (math.isfinite(primary_gap) and math.isfinite(secondary_gap)):
        raise ValueError("gap thresholds must be finite")
    if not secondary_gap < primary_gap:
        raise ValueError(
            f"secondary_gap {secondary_gap!r} must be below primary_gap {primary_gap!r}"
        )
    records = []
    for i in range(len(s.levels) - 1):
        gap = s.levels[i + 1].energy - s.levels[i].energy
        if gap > primary_gap:
            grade = MagicGrade.PRIMARY
        elif gap > secondary_gap:
            grade = MagicGrade.SECONDARY
        else:
            continue
        records.append(MagicRecord(s.levels[i], gap, s.cumulative[i], grade))
    return records


_ROW = "{:>3} {:>3} {:>8} {:>8} {:>6}"


def render_table(s: LevelScheme, records: list[MagicRecord]) -> str:
    """Text table of the scheme: n, l, energy, capacity, running total.

    Totals that close a primary shell are marked with '*' and followed by
    a row holding the gap to the next level, mirroring the layout used
    for published level schemes.  Output is deterministic.
    """
    primary_after = {
        (r.after_level.n, r.after_level.l): r
        for r in records
        if r.grade is MagicGrade.PRIMARY
    }
    lines = [_ROW.format("n", "l", "energy", "2(2l+1)", "total")]
    last = len(s.levels) - 1
    for i, lev in enumerate(s.levels):
        row = _ROW.format(lev.n, lev.l, f"{lev.energy:.3f}", lev.degeneracy, s.cumulative[i])
        record = primary_after.get((lev.n, lev.l))
        if record is not None:
            row += " *"
        lines.append(row)
        if record is not None and i < last:
            lines.append(_ROW.format("", "", f"{record.gap:.3f}", "", "").rstrip())
    return "\n".join(lines) + "\n"
