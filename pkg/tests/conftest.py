import random

import pytest

from seqchess import Position, generate_legal_moves, apply_move


def move_by_uci(moves, uci):
    """Pick the move with the given UCI string out of a move list."""
    found = [m for m in moves if m.uci() == uci]
    assert found, f"{uci} not in {[m.uci() for m in moves]}"
    assert len(found) == 1
    return found[0]


def play_uci_line(pos, ucis):
    """Apply a sequence of UCI moves with plain alternation."""
    for u in ucis:
        pos = apply_move(pos, move_by_uci(generate_legal_moves(pos), u))
    return pos


@pytest.fixture
def rng():
    return random.Random(20240501)


def random_walk_positions(seed, n_positions, max_plies=60, start=None):
    """Positions sampled from random legal games (standard alternation)."""
    rnd = random.Random(seed)
    out = []
    while len(out) < n_positions:
        pos = start if start is not None else Position.initial()
        for _ in range(max_plies):
            moves = generate_legal_moves(pos)
            if not moves or pos.halfmove_clock >= 100:
                break
            pos = apply_move(pos, rnd.choice(moves))
            out.append(pos)
            if len(out) >= n_positions:
                break
    return out
