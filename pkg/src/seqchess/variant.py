"""Chess under a move-order schedule, with the double-move restriction.

This layer composes the schedule-agnostic rules with a MoveSchedule.  On
the first half of a double move the mover may neither capture (en passant
included) nor leave the opponent in check; both are allowed on the second
half and at single plies.  When the restriction would leave a player with
no moves at all while unrestricted moves exist, a configurable waiver
applies.

VariantState owns game history: threefold repetition is detected here, not
in the rules core.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional

from .board import (
    IllegalMoveError,
    Move,
    Position,
    StatusKind,
    WHITE,
    _encode_move,
    _FL_CAPTURE,
    _FL_EP,
    _Scratch,
    _decode,
    game_status,
    opponent,
)
from .schedule import MoveSchedule, Phase, builtin, schedule_from_string, schedule_token


class XfenError(ValueError):
    """Malformed or inconsistent extended-FEN text."""


class WaiverMode(enum.Enum):
    """What to do when the double-move restriction empties the move list."""

    WAIVE_RESTRICTION = "waive-restriction"
    COLLAPSE_TO_SINGLE = "collapse-to-single"


class OutcomeKind(enum.Enum):
    ONGOING = "ongoing"
    WHITE_WINS = "white-wins"
    BLACK_WINS = "black-wins"
    DRAW = "draw"


class DrawReason(enum.Enum):
    STALEMATE = "stalemate"
    FIFTY_MOVE = "fifty-move"
    INSUFFICIENT_MATERIAL = "insufficient-material"
    THREEFOLD = "threefold"


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    reason: Optional[DrawReason] = None


def repetition_key(position: Position, phase: Phase) -> tuple:
    """Positions with equal keys offer identical legal-move sets: placement,
    mover, double-move phase, castling rights and en-passant target."""
    return (position.board, position.side_to_move, phase,
            position.castling, position.ep_square)


def _restricted_int_moves(scratch: _Scratch, phase: Phase,
                          restriction_enabled: bool) -> tuple[list, bool]:
    """Sorted int-encoded variant move list plus a waiver flag.

    At FIRST_OF_DOUBLE plies (restriction on) captures and checking moves
    are dropped; if that empties a non-empty list, the unfiltered list is
    returned with the flag set and the caller applies its waiver mode.
    """
    base = sorted(scratch.legal_moves())
    if phase is not Phase.FIRST_OF_DOUBLE or not restriction_enabled or not base:
        return base, False
    mover = scratch.stm
    enemy = opponent(mover)
    allowed = []
    for m in base:
        if m & (_FL_CAPTURE | _FL_EP):
            continue
        undo = scratch.make(m)
        gives_check = scratch.attacked(scratch.king_sq(enemy), mover)
        scratch.unmake(undo)
        if not gives_check:
            allowed.append(m)
    if not allowed:
        return base, True
    return allowed, False


@dataclass(frozen=True)
class VariantState:
    """Immutable game state: position + schedule + ply + repetition history.

    ``next_ply`` is 1-based and always satisfies
    ``position.side_to_move == schedule.mover_at_ply(next_ply)``.
    ``repetition_history`` holds the repetition key of every state reached
    so far, the current one included.
    """

    position: Position
    schedule: MoveSchedule
    next_ply: int = 1
    repetition_history: tuple = field(default=None)  # type: ignore[assignment]
    restriction_enabled: bool = True
    waiver_mode: WaiverMode = WaiverMode.WAIVE_RESTRICTION

    def __post_init__(self) -> None:
        if self.next_ply < 1:
            raise ValueError("next_ply is 1-based")
        expected = self.schedule.mover_at_ply(self.next_ply)
        if self.position.side_to_move != expected:
            raise ValueError(
                f"side to move does not match schedule at ply {self.next_ply}")
        if self.repetition_history is None:
            object.__setattr__(self, "repetition_history", (self.current_key(),))

    @classmethod
    def initial(cls, schedule: MoveSchedule = None, *,
                restriction_enabled: bool = True,
                waiver_mode: WaiverMode = WaiverMode.WAIVE_RESTRICTION) -> "VariantState":
        """Fresh game from the standard starting position."""
        return cls(position=Position.initial(),
                   schedule=schedule if schedule is not None else builtin("standard"),
                   restriction_enabled=restriction_enabled, waiver_mode=waiver_mode)

    # -- queries --

    def phase(self) -> Phase:
        return self.schedule.phase_at_ply(self.next_ply)

    def current_key(self) -> tuple:
        return repetition_key(self.position, self.schedule.phase_at_ply(self.next_ply))


def legal_moves(state: VariantState) -> list[Move]:
    """Variant-legal moves at the current ply, in rules-core order.

    Raises IllegalMoveError when called on a terminal state.
    """
    result = outcome(state)
    if result.kind is not OutcomeKind.ONGOING:
        raise IllegalMoveError(f"no moves in a terminal state ({result.kind.value})")
    scratch = _Scratch(state.position)
    moves, _ = _restricted_int_moves(scratch, state.phase(), state.restriction_enabled)
    return [_decode(m, state.position.files) for m in moves]


def restriction_waived(state: VariantState) -> bool:
    """True when the double-move restriction is currently waived (every
    unrestricted move would capture or give check)."""
    scratch = _Scratch(state.position)
    _, waived = _restricted_int_moves(scratch, state.phase(), state.restriction_enabled)
    return waived


def play(state: VariantState, move: Move) -> VariantState:
    """Successor state after a variant-legal move.

    The rules-core successor has its side to move overwritten to the
    schedule's mover at the next ply; under COLLAPSE_TO_SINGLE a waived
    first-of-double consumes both halves of the double move.
    """
    result = outcome(state)
    if result.kind is not OutcomeKind.ONGOING:
        raise IllegalMoveError(f"cannot play in a terminal state ({result.kind.value})")
    scratch = _Scratch(state.position)
    phase = state.phase()
    moves, waived = _restricted_int_moves(scratch, phase, state.restriction_enabled)
    encoded = _encode_move(move, state.position.files)
    if encoded not in moves:
        raise IllegalMoveError(f"move {move.uci()} is not legal at ply {state.next_ply}")
    scratch.make(encoded)
    step = 2 if (waived and phase is Phase.FIRST_OF_DOUBLE
                 and state.waiver_mode is WaiverMode.COLLAPSE_TO_SINGLE) else 1
    next_ply = state.next_ply + step
    scratch.stm = state.schedule.mover_at_ply(next_ply)
    new_position = scratch.to_position()
    key = repetition_key(new_position, state.schedule.phase_at_ply(next_ply))
    return replace(state, position=new_position, next_ply=next_ply,
                   repetition_history=state.repetition_history + (key,))


def outcome(state: VariantState) -> Outcome:
    """Terminal classification, in a fixed order: mate/stalemate first, then
    insufficient material, the fifty-move rule, and finally threefold
    repetition of the current key."""
    status = game_status(state.position)
    if status.kind is StatusKind.CHECKMATE:
        winner = opponent(status.loser)
        return Outcome(OutcomeKind.WHITE_WINS if winner == WHITE else OutcomeKind.BLACK_WINS)
    if status.kind is StatusKind.STALEMATE:
        return Outcome(OutcomeKind.DRAW, DrawReason.STALEMATE)
    if status.kind is StatusKind.DRAW_INSUFFICIENT_MATERIAL:
        return Outcome(OutcomeKind.DRAW, DrawReason.INSUFFICIENT_MATERIAL)
    if status.kind is StatusKind.DRAW_FIFTY_MOVE:
        return Outcome(OutcomeKind.DRAW, DrawReason.FIFTY_MOVE)
    if state.repetition_history.count(state.current_key()) >= 3:
        return Outcome(OutcomeKind.DRAW, DrawReason.THREEFOLD)
    return Outcome(OutcomeKind.ONGOING)


# --- extended FEN --------------------------------------------------------------
#
# xFEN = standard 6-field FEN, then `sched=<builtin-id-or-spec>`, then
# `ply=<next_ply>`, single-space separated.  Repetition history is not
# serialized: a decoded state starts a fresh history seeded with its own key.


def encode_xfen(state: VariantState) -> str:
    return (f"{state.position.fen()} sched={schedule_token(state.schedule)}"
            f" ply={state.next_ply}")


def decode_xfen(text: str, *,
                restriction_enabled: bool = True,
                waiver_mode: WaiverMode = WaiverMode.WAIVE_RESTRICTION) -> VariantState:
    parts = text.split(" ")
    if len(parts) != 8:
        raise XfenError(f"xFEN must be '<6-field FEN> sched=... ply=...': {text!r}")
    fen = " ".join(parts[:6])
    sched_part, ply_part = parts[6], parts[7]
    if not sched_part.startswith("sched="):
        raise XfenError(f"expected sched=<id-or-spec>, got {sched_part!r}")
    if not ply_part.startswith("ply="):
        raise XfenError(f"expected ply=<n>, got {ply_part!r}")
    try:
        schedule = schedule_from_string(sched_part[len("sched="):])
    except ValueError as exc:
        raise XfenError(f"bad schedule in xFEN: {exc}") from None
    try:
        ply = int(ply_part[len("ply="):])
    except ValueError:
        raise XfenError(f"bad ply in xFEN: {ply_part!r}") from None
    if ply < 1:
        raise XfenError("ply is 1-based")
    phase = schedule.phase_at_ply(ply)
    try:
        position = Position.from_fen(
            fen, allow_side_not_to_move_in_check=phase is Phase.SECOND_OF_DOUBLE)
    except ValueError as exc:
        raise XfenError(str(exc)) from None
    if position.side_to_move != schedule.mover_at_ply(ply):
        raise XfenError(
            f"side to move {fen.split()[1]!r} contradicts schedule "
            f"{schedule_token(schedule)!r} at ply {ply}")
    return VariantState(position=position, schedule=schedule, next_ply=ply,
                        restriction_enabled=restriction_enabled, waiver_mode=waiver_mode)


# --- variant perft --------------------------------------------------------------


def variant_perft(state: VariantState, depth: int, *, depth_limit: int = 6) -> int:
    """Count legal play sequences of exactly ``depth`` plies.

    Like rules-core perft this counts raw move sequences: draw adjudication
    (fifty-move, repetition) does not prune the tree, so under the standard
    schedule the two perft counts coincide.
    """
    if depth < 0:
        raise ValueError("perft depth must be non-negative")
    if depth > depth_limit:
        raise ValueError(f"perft depth {depth} exceeds limit {depth_limit}")
    if depth == 0:
        return 1
    scratch = _Scratch(state.position)
    schedule = state.schedule
    restriction = state.restriction_enabled
    collapse = state.waiver_mode is WaiverMode.COLLAPSE_TO_SINGLE

    def walk(ply: int, d: int) -> int:
        phase = schedule.phase_at_ply(ply)
        moves, waived = _restricted_int_moves(scratch, phase, restriction)
        if d == 1:
            return len(moves)
        step = 2 if (waived and collapse) else 1
        next_stm = schedule.mover_at_ply(ply + step)
        total = 0
        for m in moves:
            undo = scratch.make(m)
            scratch.stm = next_stm
            total += walk(ply + step, d - 1)
            scratch.unmake(undo)
        return total

    return walk(state.next_ply, depth)


def variant_perft_divide(state: VariantState, depth: int, *,
                         depth_limit: int = 6) -> list[tuple[Move, int]]:
    """Per-root-move subtree counts, ordered like legal_moves."""
    if depth < 1:
        raise ValueError("divide needs depth >= 1")
    rows = []
    for move in legal_moves(state):
        child = play(state, move)
        rows.append((move, variant_perft(child, depth - 1, depth_limit=depth_limit)))
    return rows
