"""Move-order schedules: who moves at each ply, and double-move phases.

A schedule is an infinite color sequence represented as a finite prefix
followed by a repeating cycle.  Plies are 1-based.  The five built-in
schedules cover strict alternation, a single early double move for Black,
the balanced form with one double move per side, the first 16 symbols of
the Prouhet-Thue-Morse sequence, and all-double-move play.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .board import BLACK, WHITE


class ScheduleError(ValueError):
    """Malformed schedule specification."""


class Phase(enum.Enum):
    SINGLE = "single"
    FIRST_OF_DOUBLE = "first-of-double"
    SECOND_OF_DOUBLE = "second-of-double"


def _color_of(ch: str) -> int:
    if ch == "W":
        return WHITE
    if ch == "B":
        return BLACK
    raise ScheduleError(f"bad color character {ch!r} (expected W or B)")


def _letters(colors: tuple[int, ...]) -> str:
    return "".join("W" if c == WHITE else "B" for c in colors)


def _canonical(prefix: tuple[int, ...], cycle: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Minimal prefix plus primitive cycle.

    Two eventually periodic sequences are ply-for-ply equal iff their
    canonical forms match, so equality can be structural.
    """
    for d in range(1, len(cycle) + 1):
        if len(cycle) % d == 0 and cycle == cycle[:d] * (len(cycle) // d):
            cycle = cycle[:d]
            break
    while prefix and prefix[-1] == cycle[-1]:
        prefix = prefix[:-1]
        cycle = cycle[-1:] + cycle[:-1]
    return prefix, cycle


@dataclass(frozen=True, eq=False)
class MoveSchedule:
    """Eventually periodic assignment of plies to colors.

    The (prefix, cycle) pair is canonicalized on construction; equality and
    hashing compare canonical forms, so any two spellings of the same
    infinite sequence are equal.  The id is a display name only.
    """

    id: str
    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.cycle:
            raise ScheduleError("schedule cycle must be non-empty")
        if len(set(self.cycle)) == 1:
            raise ScheduleError("schedule cycle must contain both colors")
        prefix, cycle = _canonical(self.prefix, self.cycle)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)
        # no player may ever have three moves in a row; scanning the prefix
        # plus three cycle copies covers every junction
        probe = self.prefix + self.cycle * 3
        run = 0
        prev = 0
        for c in probe:
            run = run + 1 if c == prev else 1
            prev = c
            if run >= 3:
                raise ScheduleError("schedule gives one player three consecutive moves")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MoveSchedule):
            return NotImplemented
        return self.prefix == other.prefix and self.cycle == other.cycle

    def __hash__(self) -> int:
        return hash((self.prefix, self.cycle))

    def __repr__(self) -> str:
        return f"MoveSchedule({self.id!r}, {self.spec_string()!r})"

    # -- core queries --

    def cursor_at_ply(self, ply: int) -> int:
        """Canonical schedule position: two plies with equal cursors see the
        identical future color sequence.  Prefix plies map to themselves,
        cycle plies to their offset within the cycle."""
        if ply < 1:
            raise ValueError("ply numbers are 1-based")
        np = len(self.prefix)
        if ply <= np:
            return ply
        return np + 1 + (ply - np - 1) % len(self.cycle)

    def mover_at_ply(self, ply: int) -> int:
        if ply < 1:
            raise ValueError("ply numbers are 1-based")
        np = len(self.prefix)
        if ply <= np:
            return self.prefix[ply - 1]
        return self.cycle[(ply - np - 1) % len(self.cycle)]

    def phase_at_ply(self, ply: int) -> Phase:
        me = self.mover_at_ply(ply)
        if self.mover_at_ply(ply + 1) == me:
            return Phase.FIRST_OF_DOUBLE
        if ply > 1 and self.mover_at_ply(ply - 1) == me:
            return Phase.SECOND_OF_DOUBLE
        return Phase.SINGLE

    def first_plies(self, n: int) -> str:
        """Letters for plies 1..n, e.g. 'WBBWW...'."""
        return "".join("W" if self.mover_at_ply(k) == WHITE else "B" for k in range(1, n + 1))

    def spec_string(self) -> str:
        return f"{_letters(self.prefix)}/{_letters(self.cycle)}"


def parse_schedule(spec: str) -> MoveSchedule:
    """Parse a 'prefix/cycle' string over the alphabet {W, B}.

    Examples: 'WBBWW/WB' (the balanced schedule), '/WB' (standard
    alternation), 'W/BBWW'.
    """
    if spec.count("/") != 1:
        raise ScheduleError(f"schedule spec must contain exactly one '/': {spec!r}")
    prefix_text, cycle_text = spec.split("/")
    prefix = tuple(_color_of(ch) for ch in prefix_text)
    cycle = tuple(_color_of(ch) for ch in cycle_text)
    return MoveSchedule(id=spec, prefix=prefix, cycle=cycle)


def format_schedule(schedule: MoveSchedule) -> str:
    """Inverse of parse_schedule; parse(format(s)) equals s."""
    return schedule.spec_string()


_W, _B = WHITE, BLACK

# The displayed 16 symbols of the Prouhet-Thue-Morse sequence.  The true
# sequence is aperiodic; repeating its first 16 symbols is an approximation,
# flagged wherever schedules are reported.
_THUE_MORSE_16 = (_W, _B, _B, _W, _B, _W, _W, _B, _B, _W, _W, _B, _W, _B, _B, _W)

BUILTIN_SCHEDULES: dict[str, MoveSchedule] = {
    "standard": MoveSchedule("standard", (), (_W, _B)),
    "black-favorable": MoveSchedule("black-favorable", (_W, _B, _B), (_W, _B)),
    "balanced": MoveSchedule("balanced", (_W, _B, _B, _W, _W), (_B, _W)),
    "prouhet-thue-morse": MoveSchedule("prouhet-thue-morse", _THUE_MORSE_16, _THUE_MORSE_16),
    "marseillais": MoveSchedule("marseillais", (), (_W, _W, _B, _B)),
}


def builtin(name: str) -> MoveSchedule:
    try:
        return BUILTIN_SCHEDULES[name]
    except KeyError:
        known = ", ".join(BUILTIN_SCHEDULES)
        raise ScheduleError(f"unknown schedule {name!r} (known: {known})") from None


def schedule_from_string(text: str) -> MoveSchedule:
    """Accept either a builtin id or a 'prefix/cycle' spec string."""
    if text in BUILTIN_SCHEDULES:
        return BUILTIN_SCHEDULES[text]
    return parse_schedule(text)


def schedule_token(schedule: MoveSchedule) -> str:
    """Stable text form: the builtin id when the schedule is a builtin
    (compared structurally), otherwise its spec string."""
    for name, s in BUILTIN_SCHEDULES.items():
        if s == schedule:
            return name
    return schedule.spec_string()
