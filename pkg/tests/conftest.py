"""Shared helpers: fixture loading, hand-built grids, independent oracles."""

from __future__ import annotations

import math
from pathlib import Path

from grasp.env import MOVE_DELTAS, Action
from grasp.generate import GRID_SIZE, Grid

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(*parts: str) -> str:
    return FIXTURES.joinpath(*parts).read_text(encoding="utf-8")


def make_grid(
    start=(5, 5),
    energy=(),
    obstacles=(),
) -> Grid:
    """Small hand-specified grid; energy may be (r, c) or (r, c, units)."""
    e = [[0] * GRID_SIZE for _ in range(GRID_SIZE)]
    o = [[False] * GRID_SIZE for _ in range(GRID_SIZE)]
    for item in energy:
        if len(item) == 3:
            r, c, units = item
        else:
            (r, c), units = item, 1
        e[r][c] = units
    for r, c in obstacles:
        o[r][c] = True
    return Grid(energy=e, obstacles=o, start=tuple(start), spec=None)


def shortest_distances(grid: Grid, start, moves) -> list[list[float]]:
    """Brute-force shortest path lengths by iterative relaxation.

    Deliberately not a queue-based search so it can stand as an independent
    oracle for the agents' BFS.
    """
    dist = [[math.inf] * GRID_SIZE for _ in range(GRID_SIZE)]
    dist[start[0]][start[1]] = 0.0
    changed = True
    while changed:
        changed = False
        for r in range(GRID_SIZE):
            for c in range(GRID_SIZE):
                here = dist[r][c]
                if here == math.inf:
                    continue
                for move in moves:
                    dr, dc = MOVE_DELTAS[move]
                    nr, nc = r + dr, c + dc
                    if (
                        0 <= nr < GRID_SIZE
                        and 0 <= nc < GRID_SIZE
                        and not grid.obstacles[nr][nc]
                        and here + 1 < dist[nr][nc]
                    ):
                        dist[nr][nc] = here + 1
                        changed = True
    return dist


def nearest_energy_distance(grid: Grid, belief, start, moves) -> float:
    dist = shortest_distances(grid, start, moves)
    best = math.inf
    for r in range(GRID_SIZE):
        for c in range(GRID_SIZE):
            if belief[r][c] >= 1:
                best = min(best, dist[r][c])
    return best


# Response strings for the plan parser and the plans they must produce.
# Notes are checked separately where a vector expects them.
A = Action
PARSER_VECTORS = [
    ("[UP, TAKE, DOWN, DROP]", [A.UP, A.TAKE, A.DOWN, A.DROP]),
    ("Sure! Here is my plan: [right, take] hope that helps", [A.RIGHT, A.TAKE]),
    ("[UP, FLY, DOWN]", [A.UP, A.INVALID_TOKEN, A.DOWN]),
    ("I cannot help with that.", []),
    ("", []),
    ("[]", []),
    ("[   ]", []),
    ('["UP", "DOWN"]', [A.UP, A.DOWN]),
    ("['up', 'take']", [A.UP, A.TAKE]),
    ("[UP,\n DOWN,\n TAKE]", [A.UP, A.DOWN, A.TAKE]),
    ("First try [UP] no wait: [DOWN, DOWN]", [A.DOWN, A.DOWN]),
    ("[STEP, STEP, ...]", [A.INVALID_TOKEN] * 3),
    ("[Up, dOwN, LeFt, RiGhT]", [A.UP, A.DOWN, A.LEFT, A.RIGHT]),
    ("[UP, DOWN,]", [A.UP, A.DOWN, A.INVALID_TOKEN]),
    ("[UPLEFT, DOWNRIGHT, TAKE, DROP]", [A.UPLEFT, A.DOWNRIGHT, A.TAKE, A.DROP]),
    ("[MOVE UP, TAKE]", [A.INVALID_TOKEN, A.TAKE]),
    ("[[UP, DOWN]", [A.UP, A.DOWN]),
    ("  [ UP ,  TAKE ]  ", [A.UP, A.TAKE]),
    ("[up take]", [A.INVALID_TOKEN]),
    ("[->, UP]", [A.INVALID_TOKEN, A.UP]),
    ("UP, DOWN without any brackets", []),
    (
        "Reasoning: go right, grab it, come back.\nFinal: [RIGHT, TAKE, LEFT, DROP]",
        [A.RIGHT, A.TAKE, A.LEFT, A.DROP],
    ),
]
