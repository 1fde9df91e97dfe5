"""Standard chess mechanics on boards of configurable size.

Everything in this module is schedule-agnostic: positions alternate colors
exactly as in over-the-board chess.  Boards smaller than 8x8 (down to 3x3)
are supported so that the exact solver has tractable instances; pawn and
castling rules degrade as documented on :class:`Position`.

Positions are immutable values and every operation is a pure function, so
they are safe to share across threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple, Optional

WHITE = 1
BLACK = -1

PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING = 1, 2, 3, 4, 5, 6

PIECE_CHARS = {
    PAWN: "P", KNIGHT: "N", BISHOP: "B", ROOK: "R", QUEEN: "Q", KING: "K",
    -PAWN: "p", -KNIGHT: "n", -BISHOP: "b", -ROOK: "r", -QUEEN: "q", -KING: "k",
}
CHAR_PIECES = {v: k for k, v in PIECE_CHARS.items()}

# castling-rights bits
CASTLE_WK, CASTLE_WQ, CASTLE_BK, CASTLE_BQ = 1, 2, 4, 8

_KNIGHT_JUMPS = ((1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2))
_ORTHO_DIRS = ((0, 1), (0, -1), (1, 0), (-1, 0))
_DIAG_DIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

MIN_SIZE = 3
MAX_SIZE = 8


class InvalidPositionError(ValueError):
    """The described position violates a board or chess-state invariant."""


class IllegalMoveError(ValueError):
    """A move was applied that is not legal in the given position."""


def opponent(color: int) -> int:
    return -color


def color_char(color: int) -> str:
    return "w" if color == WHITE else "b"


class Square(NamedTuple):
    """Zero-based (file, rank) coordinate; rank 0 is White's back rank."""

    file: int
    rank: int

    def index(self, files: int) -> int:
        return self.rank * files + self.file

    @classmethod
    def from_index(cls, index: int, files: int) -> "Square":
        return cls(index % files, index // files)

    @classmethod
    def from_name(cls, name: str) -> "Square":
        if len(name) < 2 or not name[0].isalpha() or not name[1:].isdigit():
            raise ValueError(f"bad square name: {name!r}")
        return cls(ord(name[0].lower()) - ord("a"), int(name[1:]) - 1)

    def name(self) -> str:
        return chr(ord("a") + self.file) + str(self.rank + 1)


class Piece(NamedTuple):
    color: int
    kind: int

    @property
    def char(self) -> str:
        return PIECE_CHARS[self.color * self.kind]


# promotion kinds in deterministic output order
PROMOTION_KINDS = (KNIGHT, BISHOP, ROOK, QUEEN)


@dataclass(frozen=True)
class Move:
    """A single half-move.

    ``promotion`` is a piece kind (KNIGHT..QUEEN) or ``None``.  The flag
    fields mirror how the move generator classified the move; ``capture``
    is set for en-passant captures as well.
    """

    from_square: Square
    to_square: Square
    promotion: Optional[int] = None
    capture: bool = False
    en_passant: bool = False
    castle_kingside: bool = False
    castle_queenside: bool = False
    double_step: bool = False

    def uci(self) -> str:
        suffix = PIECE_CHARS[self.promotion].lower() if self.promotion else ""
        return self.from_square.name() + self.to_square.name() + suffix

    def __str__(self) -> str:
        return self.uci()


class StatusKind(enum.Enum):
    ONGOING = "ongoing"
    CHECKMATE = "checkmate"
    STALEMATE = "stalemate"
    DRAW_FIFTY_MOVE = "draw-fifty-move"
    DRAW_INSUFFICIENT_MATERIAL = "draw-insufficient-material"


@dataclass(frozen=True)
class GameStatus:
    kind: StatusKind
    loser: Optional[int] = None  # set for CHECKMATE


# --- move generation tables --------------------------------------------------


class _Geometry:
    """Per-board-size lookup tables, built once and shared."""

    __slots__ = ("files", "ranks", "size", "knight", "king", "rays_ortho",
                 "rays_diag", "pawn_sources_w", "pawn_sources_b", "castle_mask")

    def __init__(self, files: int, ranks: int) -> None:
        self.files = files
        self.ranks = ranks
        self.size = files * ranks
        knight, king, rays_o, rays_d = [], [], [], []
        psrc_w, psrc_b = [], []
        for s in range(self.size):
            f, r = s % files, s // files
            knight.append(tuple(
                (r + dr) * files + (f + df)
                for df, dr in _KNIGHT_JUMPS
                if 0 <= f + df < files and 0 <= r + dr < ranks))
            king.append(tuple(
                (r + dr) * files + (f + df)
                for df in (-1, 0, 1) for dr in (-1, 0, 1)
                if (df or dr) and 0 <= f + df < files and 0 <= r + dr < ranks))
            for dirs, out in ((_ORTHO_DIRS, rays_o), (_DIAG_DIRS, rays_d)):
                rays = []
                for df, dr in dirs:
                    ray = []
                    nf, nr = f + df, r + dr
                    while 0 <= nf < files and 0 <= nr < ranks:
                        ray.append(nr * files + nf)
                        nf += df
                        nr += dr
                    if ray:
                        rays.append(tuple(ray))
                out.append(tuple(rays))
            for color, out in ((WHITE, psrc_w), (BLACK, psrc_b)):
                # squares from which a pawn of `color` attacks s
                out.append(tuple(
                    (r - color) * files + (f + df)
                    for df in (-1, 1)
                    if 0 <= f + df < files and 0 <= r - color < ranks))
        self.knight = tuple(knight)
        self.king = tuple(king)
        self.rays_ortho = tuple(rays_o)
        self.rays_diag = tuple(rays_d)
        self.pawn_sources_w = tuple(psrc_w)
        self.pawn_sources_b = tuple(psrc_b)
        # castling-rights mask per square touched (full 8x8 board only)
        mask = [15] * self.size
        if files == 8 and ranks == 8:
            mask[0] = 15 ^ CASTLE_WQ
            mask[4] = 15 ^ (CASTLE_WK | CASTLE_WQ)
            mask[7] = 15 ^ CASTLE_WK
            mask[56] = 15 ^ CASTLE_BQ
            mask[60] = 15 ^ (CASTLE_BK | CASTLE_BQ)
            mask[63] = 15 ^ CASTLE_BK
        self.castle_mask = tuple(mask)


@lru_cache(maxsize=None)
def _geometry(files: int, ranks: int) -> _Geometry:
    return _Geometry(files, ranks)


# --- integer move encoding ---------------------------------------------------
#
# Moves travel through the hot paths as single ints ordered so that sorting
# the ints sorts by (from-square, to-square, promotion kind).

_FL_CAPTURE, _FL_EP, _FL_CASTLE_K, _FL_CASTLE_Q, _FL_DOUBLE = 1, 2, 4, 8, 16


def _encode(fr: int, to: int, promo: int = 0, flags: int = 0) -> int:
    return (((fr << 7 | to) << 3) | promo) << 5 | flags


def _decode(m: int, files: int) -> Move:
    flags = m & 31
    promo = (m >> 5) & 7
    to = (m >> 8) & 127
    fr = m >> 15
    return Move(
        from_square=Square.from_index(fr, files),
        to_square=Square.from_index(to, files),
        promotion=promo or None,
        capture=bool(flags & (_FL_CAPTURE | _FL_EP)),
        en_passant=bool(flags & _FL_EP),
        castle_kingside=bool(flags & _FL_CASTLE_K),
        castle_queenside=bool(flags & _FL_CASTLE_Q),
        double_step=bool(flags & _FL_DOUBLE),
    )


def _encode_move(move: Move, files: int) -> int:
    flags = 0
    if move.capture and not move.en_passant:
        flags |= _FL_CAPTURE
    if move.en_passant:
        flags |= _FL_CAPTURE | _FL_EP
    if move.castle_kingside:
        flags |= _FL_CASTLE_K
    if move.castle_queenside:
        flags |= _FL_CASTLE_Q
    if move.double_step:
        flags |= _FL_DOUBLE
    return _encode(move.from_square.index(files), move.to_square.index(files),
                   move.promotion or 0, flags)


# --- position ----------------------------------------------------------------


@dataclass(frozen=True)
class Position:
    """Immutable chess state.

    ``board`` is a flat tuple of signed piece codes, rank-major with index
    ``rank * files + file`` (a1 first on 8x8).  Reduced boards follow the
    same conventions with these adjustments:

    * pawns promote on the last rank of the configured board;
    * the double pawn step exists only when ``ranks >= 5``, from each
      side's conventional starting rank (1 and ``ranks - 2``);
    * castling exists only on the full 8x8 board.
    """

    board: tuple
    side_to_move: int = WHITE
    castling: int = 0
    ep_square: Optional[int] = None
    halfmove_clock: int = 0
    fullmove_number: int = 1
    files: int = 8
    ranks: int = 8

    # -- constructors --

    @classmethod
    def initial(cls) -> "Position":
        back = (ROOK, KNIGHT, BISHOP, QUEEN, KING, BISHOP, KNIGHT, ROOK)
        board = [0] * 64
        for f in range(8):
            board[f] = back[f]
            board[8 + f] = PAWN
            board[48 + f] = -PAWN
            board[56 + f] = -back[f]
        return cls(board=tuple(board), side_to_move=WHITE,
                   castling=CASTLE_WK | CASTLE_WQ | CASTLE_BK | CASTLE_BQ)

    @classmethod
    def from_fen(cls, fen: str, *, allow_side_not_to_move_in_check: bool = False) -> "Position":
        """Parse a 6-field FEN.  Reduced boards use the same grammar with
        fewer ranks in the placement field and shorter rank rows.

        Raises:
            InvalidPositionError: on malformed text or a position that
                breaks a state invariant (king counts, adjacency, pawns on
                terminal ranks, inconsistent castling or en-passant data).
        """
        parts = fen.split()
        if len(parts) != 6:
            raise InvalidPositionError(f"FEN must have 6 fields, got {len(parts)}: {fen!r}")
        placement, stm_text, castling_text, ep_text, halfmove_text, fullmove_text = parts

        rows = placement.split("/")
        ranks = len(rows)
        board_rows = []
        for row in rows:
            cells = []
            for ch in row:
                if ch.isdigit():
                    n = int(ch)
                    if n == 0:
                        raise InvalidPositionError("zero run length in FEN rank")
                    cells.extend([0] * n)
                elif ch in CHAR_PIECES:
                    cells.append(CHAR_PIECES[ch])
                else:
                    raise InvalidPositionError(f"bad piece char {ch!r} in FEN")
            board_rows.append(cells)
        files = len(board_rows[0])
        if any(len(r) != files for r in board_rows):
            raise InvalidPositionError("FEN ranks have inconsistent widths")
        if not (MIN_SIZE <= files <= MAX_SIZE and MIN_SIZE <= ranks <= MAX_SIZE):
            raise InvalidPositionError(f"board size {files}x{ranks} out of range")
        flat = []
        for row in reversed(board_rows):
            flat.extend(row)

        if stm_text not in ("w", "b"):
            raise InvalidPositionError(f"bad side-to-move field {stm_text!r}")
        stm = WHITE if stm_text == "w" else BLACK

        castling = 0
        if castling_text != "-":
            for ch in castling_text:
                bit = {"K": CASTLE_WK, "Q": CASTLE_WQ, "k": CASTLE_BK, "q": CASTLE_BQ}.get(ch)
                if bit is None or castling & bit:
                    raise InvalidPositionError(f"bad castling field {castling_text!r}")
                castling |= bit

        ep_square = None
        if ep_text != "-":
            try:
                sq = Square.from_name(ep_text)
            except ValueError as exc:
                raise InvalidPositionError(str(exc)) from None
            if not (0 <= sq.file < files and 0 <= sq.rank < ranks):
                raise InvalidPositionError(f"en-passant square {ep_text!r} off the board")
            ep_square = sq.index(files)

        try:
            halfmove = int(halfmove_text)
            fullmove = int(fullmove_text)
        except ValueError:
            raise InvalidPositionError("bad move counters in FEN") from None
        if halfmove < 0 or fullmove < 1:
            raise InvalidPositionError("bad move counters in FEN")

        pos = cls(board=tuple(flat), side_to_move=stm, castling=castling,
                  ep_square=ep_square, halfmove_clock=halfmove,
                  fullmove_number=fullmove, files=files, ranks=ranks)
        pos.validate(allow_side_not_to_move_in_check=allow_side_not_to_move_in_check)
        return pos

    # -- serialization --

    def fen(self) -> str:
        rows = []
        for r in range(self.ranks - 1, -1, -1):
            row = ""
            run = 0
            for f in range(self.files):
                p = self.board[r * self.files + f]
                if p == 0:
                    run += 1
                else:
                    if run:
                        row += str(run)
                        run = 0
                    row += PIECE_CHARS[p]
            if run:
                row += str(run)
            rows.append(row)
        castling = "".join(ch for ch, bit in
                           (("K", CASTLE_WK), ("Q", CASTLE_WQ), ("k", CASTLE_BK), ("q", CASTLE_BQ))
                           if self.castling & bit) or "-"
        ep = Square.from_index(self.ep_square, self.files).name() if self.ep_square is not None else "-"
        return " ".join(("/".join(rows), color_char(self.side_to_move), castling, ep,
                         str(self.halfmove_clock), str(self.fullmove_number)))

    # -- inspection --

    def piece_at(self, square: Square) -> Optional[Piece]:
        p = self.board[square.index(self.files)]
        if p == 0:
            return None
        return Piece(WHITE if p > 0 else BLACK, abs(p))

    def pieces(self) -> Iterator[tuple[Square, Piece]]:
        for i, p in enumerate(self.board):
            if p:
                yield Square.from_index(i, self.files), Piece(WHITE if p > 0 else BLACK, abs(p))

    def king_square(self, color: int) -> int:
        target = color * KING
        for i, p in enumerate(self.board):
            if p == target:
                return i
        raise InvalidPositionError(f"no {color_char(color)} king on board")

    # -- validation --

    def validate(self, *, allow_side_not_to_move_in_check: bool = False) -> None:
        """Check state invariants, raising InvalidPositionError on failure.

        ``allow_side_not_to_move_in_check`` relaxes the usual rule that the
        side which just moved may not be left in check; double-move
        schedules legitimately produce such states mid-double.
        """
        files, ranks = self.files, self.ranks
        if not (MIN_SIZE <= files <= MAX_SIZE and MIN_SIZE <= ranks <= MAX_SIZE):
            raise InvalidPositionError(f"board size {files}x{ranks} out of range")
        if len(self.board) != files * ranks:
            raise InvalidPositionError("board length does not match dimensions")
        kings = {WHITE: [], BLACK: []}
        for i, p in enumerate(self.board):
            if p == 0:
                continue
            if abs(p) > KING:
                raise InvalidPositionError(f"bad piece code {p} at index {i}")
            if abs(p) == KING:
                kings[WHITE if p > 0 else BLACK].append(i)
            if abs(p) == PAWN:
                r = i // files
                if r == 0 or r == ranks - 1:
                    raise InvalidPositionError("pawn on a terminal rank")
        for color in (WHITE, BLACK):
            if len(kings[color]) != 1:
                raise InvalidPositionError(
                    f"{color_char(color)} must have exactly one king, found {len(kings[color])}")
        wf, wr = kings[WHITE][0] % files, kings[WHITE][0] // files
        bf, br = kings[BLACK][0] % files, kings[BLACK][0] // files
        if max(abs(wf - bf), abs(wr - br)) <= 1:
            raise InvalidPositionError("kings are adjacent")

        if self.castling:
            if files != 8 or ranks != 8:
                raise InvalidPositionError("castling rights on a reduced board")
            req = ((CASTLE_WK, 4, KING), (CASTLE_WK, 7, ROOK), (CASTLE_WQ, 4, KING),
                   (CASTLE_WQ, 0, ROOK), (CASTLE_BK, 60, -KING), (CASTLE_BK, 63, -ROOK),
                   (CASTLE_BQ, 60, -KING), (CASTLE_BQ, 56, -ROOK))
            for bit, sq, piece in req:
                if self.castling & bit and self.board[sq] != piece:
                    raise InvalidPositionError("castling rights without king/rook on home squares")

        if self.ep_square is not None:
            # some pawn must just have double-stepped over this square; under
            # double-move schedules that pawn may belong to either color, so
            # both patterns are acceptable
            def _stepped(mover: int) -> bool:
                pawn_sq = self.ep_square + (files if mover == WHITE else -files)
                origin_sq = self.ep_square - (files if mover == WHITE else -files)
                expected_rank = 2 if mover == WHITE else ranks - 3
                return (ranks >= 5
                        and self.ep_square // files == expected_rank
                        and 0 <= pawn_sq < files * ranks
                        and 0 <= origin_sq < files * ranks
                        and self.board[pawn_sq] == mover * PAWN
                        and self.board[self.ep_square] == 0
                        and self.board[origin_sq] == 0)

            if not (_stepped(opponent(self.side_to_move)) or _stepped(self.side_to_move)):
                raise InvalidPositionError("en-passant square inconsistent with placement")

        if not allow_side_not_to_move_in_check:
            scratch = _Scratch(self)
            if scratch.attacked(scratch.king_sq(opponent(self.side_to_move)), self.side_to_move):
                raise InvalidPositionError("side not to move is in check")


# --- mutable scratch state for move generation and search --------------------


class _Scratch:
    """Mutable mirror of a Position for make/unmake style tree walks.

    Not part of the public API; Position stays immutable and pure functions
    below copy in and out of this.
    """

    __slots__ = ("geo", "bd", "stm", "castling", "ep", "clock", "fullmove", "wk", "bk")

    def __init__(self, pos: Position) -> None:
        self.geo = _geometry(pos.files, pos.ranks)
        self.bd = list(pos.board)
        self.stm = pos.side_to_move
        self.castling = pos.castling
        self.ep = pos.ep_square
        self.clock = pos.halfmove_clock
        self.fullmove = pos.fullmove_number
        self.wk = self.bk = -1
        for i, p in enumerate(self.bd):
            if p == KING:
                self.wk = i
            elif p == -KING:
                self.bk = i

    def king_sq(self, color: int) -> int:
        return self.wk if color == WHITE else self.bk

    def to_position(self) -> Position:
        return Position(board=tuple(self.bd), side_to_move=self.stm,
                        castling=self.castling, ep_square=self.ep,
                        halfmove_clock=self.clock, fullmove_number=self.fullmove,
                        files=self.geo.files, ranks=self.geo.ranks)

    # -- attack detection --

    def attacked(self, sq: int, by: int) -> bool:
        geo = self.geo
        bd = self.bd
        for t in (geo.pawn_sources_w[sq] if by == WHITE else geo.pawn_sources_b[sq]):
            if bd[t] == by * PAWN:
                return True
        pn = by * KNIGHT
        for t in geo.knight[sq]:
            if bd[t] == pn:
                return True
        pk = by * KING
        for t in geo.king[sq]:
            if bd[t] == pk:
                return True
        pr, pq, pb = by * ROOK, by * QUEEN, by * BISHOP
        for ray in geo.rays_ortho[sq]:
            for t in ray:
                p = bd[t]
                if p:
                    if p == pr or p == pq:
                        return True
                    break
        for ray in geo.rays_diag[sq]:
            for t in ray:
                p = bd[t]
                if p:
                    if p == pb or p == pq:
                        return True
                    break
        return False

    # -- legal move generation --

    def legal_moves(self) -> list:
        """Unsorted int-encoded legal moves for the side to move.

        Moves that would land on the enemy king square are never generated;
        in ordinary chess they cannot occur, and in mid-double-move states
        (where the opponent may be in check) capturing the king is not a
        chess move.
        """
        geo = self.geo
        bd = self.bd
        stm = self.stm
        white = stm == WHITE
        files = geo.files
        size = geo.size
        ksq = self.wk if white else self.bk
        moves: list = []

        # checkers and absolute pins from the king outward
        checkers = []
        block = None
        pins: dict = {}
        pn = -stm * KNIGHT
        for t in geo.knight[ksq]:
            if bd[t] == pn:
                checkers.append(t)
        pp = -stm * PAWN
        for t in (geo.pawn_sources_b[ksq] if white else geo.pawn_sources_w[ksq]):
            if bd[t] == pp:
                checkers.append(t)
        pr, pq, pb = -stm * ROOK, -stm * QUEEN, -stm * BISHOP
        for rays, s1 in ((geo.rays_ortho[ksq], pr), (geo.rays_diag[ksq], pb)):
            for ray in rays:
                blocker = -1
                for i, t in enumerate(ray):
                    p = bd[t]
                    if p == 0:
                        continue
                    if (p > 0) == white:
                        if blocker < 0:
                            blocker = t
                            continue
                        break
                    if p == s1 or p == pq:
                        if blocker < 0:
                            checkers.append(t)
                            if block is None:
                                block = set()
                            block.update(ray[:i + 1])
                        else:
                            allowed = set(ray[:i + 1])
                            allowed.discard(blocker)
                            pins[blocker] = allowed
                    break
        ncheck = len(checkers)
        if ncheck == 1 and block is None:
            block = {checkers[0]}

        # king moves (with the king lifted off the board for x-ray safety)
        ok_piece = stm * KING
        ek = -ok_piece
        bd[ksq] = 0
        for t in geo.king[ksq]:
            p = bd[t]
            if p != 0 and ((p > 0) == white or p == ek):
                continue
            if not self.attacked(t, -stm):
                moves.append(_encode(ksq, t, 0, _FL_CAPTURE if p else 0))
        bd[ksq] = ok_piece
        if ncheck >= 2:
            return moves

        chk = ncheck == 1
        last_rank = geo.ranks - 1 if white else 0
        start_rank = 1 if white else geo.ranks - 2
        fdir = files if white else -files
        ep = self.ep
        for s in range(size):
            p = bd[s]
            if p == 0 or (p > 0) != white:
                continue
            kind = p if white else -p
            if kind == KING:
                continue
            pinset = pins.get(s)
            if kind == PAWN:
                f = s % files
                t = s + fdir
                if bd[t] == 0:
                    if (pinset is None or t in pinset) and (not chk or t in block):
                        if t // files == last_rank:
                            for pk2 in PROMOTION_KINDS:
                                moves.append(_encode(s, t, pk2, 0))
                        else:
                            moves.append(_encode(s, t, 0, 0))
                    if s // files == start_rank and geo.ranks >= 5:
                        t2 = t + fdir
                        if bd[t2] == 0 and (pinset is None or t2 in pinset) \
                                and (not chk or t2 in block):
                            moves.append(_encode(s, t2, 0, _FL_DOUBLE))
                for df in (-1, 1):
                    if not 0 <= f + df < files:
                        continue
                    t = s + fdir + df
                    tp = bd[t]
                    if tp != 0 and (tp > 0) != white and tp != ek:
                        if (pinset is None or t in pinset) and (not chk or t in block):
                            if t // files == last_rank:
                                for pk2 in PROMOTION_KINDS:
                                    moves.append(_encode(s, t, pk2, _FL_CAPTURE))
                            else:
                                moves.append(_encode(s, t, 0, _FL_CAPTURE))
                    elif ep is not None and t == ep:
                        victim = ep - fdir
                        if bd[victim] == -stm * PAWN:
                            # rare and full of edge cases: verify by doing
                            bd[s] = 0
                            bd[victim] = 0
                            bd[t] = p
                            safe = not self.attacked(ksq, -stm)
                            bd[t] = 0
                            bd[victim] = -stm * PAWN
                            bd[s] = p
                            if safe:
                                moves.append(_encode(s, t, 0, _FL_CAPTURE | _FL_EP))
            elif kind == KNIGHT:
                if pinset is not None:
                    continue
                for t in geo.knight[s]:
                    tp = bd[t]
                    if tp != 0 and ((tp > 0) == white or tp == ek):
                        continue
                    if chk and t not in block:
                        continue
                    moves.append(_encode(s, t, 0, _FL_CAPTURE if tp else 0))
            else:
                if kind == ROOK:
                    rays = geo.rays_ortho[s]
                elif kind == BISHOP:
                    rays = geo.rays_diag[s]
                else:
                    rays = geo.rays_ortho[s] + geo.rays_diag[s]
                for ray in rays:
                    for t in ray:
                        tp = bd[t]
                        if tp == 0:
                            if (pinset is None or t in pinset) and (not chk or t in block):
                                moves.append(_encode(s, t, 0, 0))
                            continue
                        if (tp > 0) != white and tp != ek:
                            if (pinset is None or t in pinset) and (not chk or t in block):
                                moves.append(_encode(s, t, 0, _FL_CAPTURE))
                        break

        if not chk and self.castling and files == 8 and geo.ranks == 8:
            if white:
                if self.castling & CASTLE_WK and bd[5] == 0 and bd[6] == 0 and bd[7] == ROOK \
                        and not self.attacked(5, BLACK) and not self.attacked(6, BLACK):
                    moves.append(_encode(4, 6, 0, _FL_CASTLE_K))
                if self.castling & CASTLE_WQ and bd[3] == 0 and bd[2] == 0 and bd[1] == 0 \
                        and bd[0] == ROOK and not self.attacked(3, BLACK) \
                        and not self.attacked(2, BLACK):
                    moves.append(_encode(4, 2, 0, _FL_CASTLE_Q))
            else:
                if self.castling & CASTLE_BK and bd[61] == 0 and bd[62] == 0 and bd[63] == -ROOK \
                        and not self.attacked(61, WHITE) and not self.attacked(62, WHITE):
                    moves.append(_encode(60, 62, 0, _FL_CASTLE_K))
                if self.castling & CASTLE_BQ and bd[59] == 0 and bd[58] == 0 and bd[57] == 0 \
                        and bd[56] == -ROOK and not self.attacked(59, WHITE) \
                        and not self.attacked(58, WHITE):
                    moves.append(_encode(60, 58, 0, _FL_CASTLE_Q))
        return moves

    # -- make / unmake --

    def make(self, m: int) -> tuple:
        """Apply an int-encoded legal move; returns an opaque undo record."""
        bd = self.bd
        files = self.geo.files
        flags = m & 31
        promo = (m >> 5) & 7
        to = (m >> 8) & 127
        fr = m >> 15
        stm = self.stm
        piece = bd[fr]
        captured = bd[to]
        undo = (fr, to, piece, captured, self.castling, self.ep, self.clock,
                self.fullmove, self.wk, self.bk, flags, stm)
        bd[fr] = 0
        bd[to] = stm * promo if promo else piece
        if flags & _FL_EP:
            victim = self.ep - (files if stm == WHITE else -files)
            bd[victim] = 0
        if flags & (_FL_CASTLE_K | _FL_CASTLE_Q):
            row = fr - fr % files
            if flags & _FL_CASTLE_K:
                bd[row + 5] = bd[row + 7]
                bd[row + 7] = 0
            else:
                bd[row + 3] = bd[row]
                bd[row] = 0
        mask = self.geo.castle_mask
        self.castling &= mask[fr] & mask[to]
        self.ep = (fr + to) >> 1 if flags & _FL_DOUBLE else None
        if captured or flags & _FL_EP or abs(piece) == PAWN:
            self.clock = 0
        else:
            self.clock += 1
        if stm == BLACK:
            self.fullmove += 1
        if piece == KING:
            self.wk = to
        elif piece == -KING:
            self.bk = to
        self.stm = -stm
        return undo

    def unmake(self, undo: tuple) -> None:
        # stm is restored from the record, not by negation: schedule-aware
        # callers overwrite the side to move between make and unmake
        fr, to, piece, captured, castling, ep, clock, fullmove, wk, bk, flags, stm = undo
        bd = self.bd
        files = self.geo.files
        if flags & (_FL_CASTLE_K | _FL_CASTLE_Q):
            row = fr - fr % files
            if flags & _FL_CASTLE_K:
                bd[row + 7] = bd[row + 5]
                bd[row + 5] = 0
            else:
                bd[row] = bd[row + 3]
                bd[row + 3] = 0
        bd[fr] = piece
        bd[to] = captured
        if flags & _FL_EP:
            victim = ep - (files if stm == WHITE else -files)
            bd[victim] = -stm * PAWN
        self.castling = castling
        self.ep = ep
        self.clock = clock
        self.fullmove = fullmove
        self.wk = wk
        self.bk = bk
        self.stm = stm


# --- public operations --------------------------------------------------------


def generate_legal_moves(pos: Position) -> list[Move]:
    """All legal moves for ``pos.side_to_move``, deterministically ordered
    by (from-square index, to-square index, promotion kind)."""
    scratch = _Scratch(pos)
    return [_decode(m, pos.files) for m in sorted(scratch.legal_moves())]


def apply_move(pos: Position, move: Move) -> Position:
    """Successor position after a legal move.

    Raises IllegalMoveError when ``move`` is not in the legal move list;
    an illegal move here is a caller bug, not a user-input condition.
    """
    scratch = _Scratch(pos)
    encoded = _encode_move(move, pos.files)
    if encoded not in scratch.legal_moves():
        raise IllegalMoveError(f"illegal move {move.uci()} in {pos.fen()!r}")
    scratch.make(encoded)
    return scratch.to_position()


def in_check(pos: Position, color: int) -> bool:
    scratch = _Scratch(pos)
    return scratch.attacked(scratch.king_sq(color), opponent(color))


def _insufficient_material(board: tuple, files: int) -> bool:
    minors = {WHITE: [], BLACK: []}
    for i, p in enumerate(board):
        if p == 0:
            continue
        k = abs(p)
        if k in (PAWN, ROOK, QUEEN):
            return False
        if k in (KNIGHT, BISHOP):
            minors[WHITE if p > 0 else BLACK].append((k, i))
    nw, nb = len(minors[WHITE]), len(minors[BLACK])
    if nw + nb <= 1:
        return True  # K vs K, or K+minor vs K
    if nw == 1 and nb == 1:
        (kw, sw), (kb, sb) = minors[WHITE][0], minors[BLACK][0]
        if kw == BISHOP and kb == BISHOP:
            shade_w = (sw % files + sw // files) % 2
            shade_b = (sb % files + sb // files) % 2
            return shade_w == shade_b
    return False


def game_status(pos: Position) -> GameStatus:
    """Classify a position.  Checks run in a fixed order: no-legal-moves
    (mate/stalemate) first, then insufficient material, then the fifty-move
    rule at 100 half-moves.  Repetition is tracked by the variant layer,
    which owns game history."""
    scratch = _Scratch(pos)
    if not scratch.legal_moves():
        if scratch.attacked(scratch.king_sq(pos.side_to_move), opponent(pos.side_to_move)):
            return GameStatus(StatusKind.CHECKMATE, loser=pos.side_to_move)
        return GameStatus(StatusKind.STALEMATE)
    if _insufficient_material(pos.board, pos.files):
        return GameStatus(StatusKind.DRAW_INSUFFICIENT_MATERIAL)
    if pos.halfmove_clock >= 100:
        return GameStatus(StatusKind.DRAW_FIFTY_MOVE)
    return GameStatus(StatusKind.ONGOING)


def perft(pos: Position, depth: int, *, depth_limit: int = 6) -> int:
    """Leaf count of the legal-move tree at exactly ``depth``.

    The default limit guards against accidental huge runs; raise it
    explicitly if you mean it.
    """
    if depth < 0:
        raise ValueError("perft depth must be non-negative")
    if depth > depth_limit:
        raise ValueError(f"perft depth {depth} exceeds limit {depth_limit}")
    if depth == 0:
        return 1
    scratch = _Scratch(pos)

    def walk(d: int) -> int:
        moves = scratch.legal_moves()
        if d == 1:
            return len(moves)
        total = 0
        for m in moves:
            undo = scratch.make(m)
            total += walk(d - 1)
            scratch.unmake(undo)
        return total

    return walk(depth)
