"""Print per-queue index tables for the small worked games.

For each queue the table lists the (3,2) pivot counts, or the per-queue
continuous SSI contributions for the two polynomial three-voter games.
"""

import argparse
from dataclasses import dataclass
from itertools import permutations

from powidx import jk as J
from powidx.continuous import ghat, gtilde, ssi_per_permutation


@dataclass(frozen=True)
class Config:
    table: str = "all"


def jk_table():
    g = J.example_jk32()
    print("(3,2) game: pivot counts per queue")
    for q in permutations((1, 2, 3)):
        print(f"  {q}: {J.pivot_counts(g, q)}")
    print(f"  SSI: {tuple(str(v) for v in J.ssi_jk(g).values)}")


def continuous_table(name, game):
    pp = ssi_per_permutation(game)
    print(f"{name}: per-queue SSI contributions (voter 1, 2, 3)")
    for q in permutations((1, 2, 3)):
        print(f"  {q}: " + ", ".join(str(pp[(i, q)][0]) for i in (1, 2, 3)))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--table", choices=("all", "jk", "ghat", "gtilde"), default=Config.table)
    cfg = Config(**vars(ap.parse_args(argv)))
    if cfg.table in ("all", "jk"):
        jk_table()
    if cfg.table in ("all", "ghat"):
        continuous_table("(x1^2 + 2 x2^2 + 3 x3^2) / 6", ghat())
    if cfg.table in ("all", "gtilde"):
        continuous_table("x1 x2^2 x3^3", gtilde())


if __name__ == "__main__":
    main()
