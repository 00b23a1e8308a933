"""Regenerates the CLI fixtures under tests/fixtures/cli from overfit64.dataset:
two monthly PGN dumps (with a few games the ingester must skip), a dump that
turns into binary garbage, and a small puzzle CSV (python-chess)."""
import os
import random
import sys

import chess

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "..", "tests", "fixtures")


def read_dataset(path):
    games = []
    with open(path) as f:
        for line in f:
            if line.startswith("#") or not line.strip():
                continue
            games.append(dict(kv.split("=", 1) for kv in line.rstrip("\n").split("\t")))
    return games


def clk(seconds):
    return "%d:%02d:%02d" % (seconds // 3600, seconds // 60 % 60, seconds % 60)


def to_pgn(g, month, event="Rated Blitz game", with_clocks=True):
    moves = g["moves"].split()
    clocks = [int(c) for c in g["clocks"].split()]
    date = month.replace("-", ".") + ".15"
    headers = [
        ("Event", event),
        ("Site", "https://lichess.org/" + g["id"]),
        ("Date", date),
        ("White", "w_" + g["id"]),
        ("Black", "b_" + g["id"]),
        ("Result", g["result"]),
        ("UTCDate", date),
        ("UTCTime", "10:00:00"),
        ("WhiteElo", g["white"]),
        ("BlackElo", g["black"]),
        ("Variant", "Standard"),
        ("TimeControl", g["tc"]),
        ("Termination", "Normal"),
    ]
    out = ["[%s \"%s\"]" % kv for kv in headers]
    out.append("")
    parts = []
    for i, (san, c) in enumerate(zip(moves, clocks)):
        prefix = "%d. " % (i // 2 + 1) if i % 2 == 0 else "%d... " % (i // 2 + 1)
        comment = " { [%%clk %s] }" % clk(c) if with_clocks else ""
        parts.append(prefix + san + comment)
    out.append(" ".join(parts) + " " + g["result"])
    out.append("")
    return "\n".join(out) + "\n"


def puzzles(path):
    rng = random.Random(7)
    rows = ["PuzzleId,FEN,Moves,Rating"]
    for i in range(12):
        board = chess.Board()
        for _ in range(rng.randint(6, 20)):
            moves = list(board.legal_moves)
            if not moves:
                break
            board.push(rng.choice(moves))
        if board.is_game_over():
            continue
        fen = board.fen()
        line = []
        for _ in range(rng.randint(2, 4)):
            moves = list(board.legal_moves)
            if not moves:
                break
            m = rng.choice(moves)
            line.append(m.uci())
            board.push(m)
        rows.append("pz%03d,%s,%s,%d" % (i, fen, " ".join(line), rng.randint(900, 2600)))
    with open(path, "w") as f:
        f.write("\n".join(rows) + "\n")


def main():
    games = read_dataset(os.path.join(FIXTURES, "overfit64.dataset"))
    out = os.path.join(FIXTURES, "cli")
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "dump_2024-06.pgn"), "w") as f:
        for g in games[:32]:
            f.write(to_pgn(g, "2024-06"))
        f.write(to_pgn(games[0], "2024-06", event="Casual Blitz game"))
        f.write(to_pgn(games[1], "2024-06", with_clocks=False))
    with open(os.path.join(out, "dump_2024-07.pgn"), "w") as f:
        for g in games[32:]:
            f.write(to_pgn(g, "2024-07"))
    with open(os.path.join(out, "corrupt.pgn"), "wb") as f:
        f.write(to_pgn(games[2], "2024-06").encode())
        f.write(bytes([0x00, 0x01, 0xFE, 0x02, 0x03]) * 8)
    with open(os.path.join(out, "single_game.pgn"), "w") as f:
        f.write(to_pgn(games[5], "2024-06"))
    puzzles(os.path.join(out, "puzzles.csv"))
    with open(os.path.join(out, "glickman_example.txt"), "w") as f:
        f.write("# player rating, RD, volatility; then opponent rating, RD, score\n")
        f.write("player 1500 200 0.06\nopponent 1400 30 1\nopponent 1550 100 0\nopponent 1700 300 0\n")
    with open(os.path.join(out, "idle_player.txt"), "w") as f:
        f.write("player 1500 200 0.06\n")


if __name__ == "__main__":
    sys.exit(main())
