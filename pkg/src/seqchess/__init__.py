"""Chess under configurable move-order schedules.

The package splits into layers:

* :mod:`seqchess.board` — schedule-agnostic chess rules on 3x3..8x8 boards;
* :mod:`seqchess.schedule` — move-order schedules (who moves at each ply);
* :mod:`seqchess.variant` — the two composed, with the double-move
  restriction, repetition history, and extended FEN;
* :mod:`seqchess.notation` — SAN lines with mover annotations;
* :mod:`seqchess.solver` — exact game values for small instances;
* :mod:`seqchess.engine` / :mod:`seqchess.study` — UCI engine studies;
* :mod:`seqchess.cli` — the ``seqchess`` command.
"""

from .board import (
    BLACK,
    WHITE,
    GameStatus,
    IllegalMoveError,
    InvalidPositionError,
    Move,
    Piece,
    Position,
    Square,
    StatusKind,
    apply_move,
    game_status,
    generate_legal_moves,
    in_check,
    perft,
)
from .schedule import (
    BUILTIN_SCHEDULES,
    MoveSchedule,
    Phase,
    ScheduleError,
    builtin,
    format_schedule,
    parse_schedule,
    schedule_from_string,
)
from .variant import (
    DrawReason,
    Outcome,
    OutcomeKind,
    VariantState,
    WaiverMode,
    XfenError,
    decode_xfen,
    encode_xfen,
    legal_moves,
    outcome,
    play,
    restriction_waived,
    variant_perft,
)

__version__ = "0.1.0"
