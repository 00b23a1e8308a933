"""Regenerates tests/fixtures/overfit64.dataset: 64 random legal games with
random ratings, time controls and decreasing clocks (python-chess)."""
import random
import sys

import chess

CONTROLS = [(15, 0), (60, 0), (120, 1), (180, 2), (300, 0), (300, 3), (600, 0), (900, 10), (1800, 0)]


def category(base, inc):
    d = base + 40 * inc
    if d <= 29:
        return "UltraBullet"
    if d <= 179:
        return "Bullet"
    if d <= 479:
        return "Blitz"
    if d <= 1499:
        return "Rapid"
    return "Classical"


def main(path):
    rng = random.Random(20240701)
    lines = ["# ratingnet-dataset v1"]
    for i in range(64):
        board = chess.Board()
        base, inc = rng.choice(CONTROLS)
        clocks = [base, base]
        sans, remaining = [], []
        for ply in range(rng.randint(20, 30)):
            moves = list(board.legal_moves)
            if not moves:
                break
            move = rng.choice(moves)
            sans.append(board.san(move))
            board.push(move)
            side = ply % 2
            spent = min(clocks[side], rng.randint(0, max(1, base // 40)))
            clocks[side] = clocks[side] - spent + inc
            remaining.append(clocks[side])
        white = max(600, min(3200, round(rng.gauss(1514, 366))))
        black = max(600, min(3200, round(rng.gauss(1514, 366))))
        lines.append("\t".join([
            f"id=ovf{i:03d}", "month=2024-07", f"white={white}", f"black={black}",
            f"tc={base}+{inc}", f"category={category(base, inc)}", "result=1/2-1/2",
            "moves=" + " ".join(sans), "clocks=" + " ".join(map(str, remaining)),
        ]))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1])
