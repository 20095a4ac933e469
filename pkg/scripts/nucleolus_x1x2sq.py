"""Two-phase nucleolus search for g(x) = x1 * x2**2.

The game has no unique max-excess minimiser, so the search falls through to
the excess-curve tournament. Expect a few minutes at the default 10**6 samples.
"""

import argparse
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from powidx.continuous import ContinuousGame
from powidx.nucleolus import SearchConfig, nucleolus_search
from powidx.profile import NumericsSpec


@dataclass(frozen=True)
class Config:
    samples: int = 10**6
    seed: int = 0
    max_rounds: int = 12
    curves_csv: Optional[str] = None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=Config.samples)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--max-rounds", type=int, default=Config.max_rounds)
    ap.add_argument("--curves-csv", default=None, help="dump every evaluated excess curve here")
    cfg = Config(**vars(ap.parse_args(argv)))

    game = ContinuousGame.monomials([(Fraction(1), (1, 2))])
    res = nucleolus_search(game, NumericsSpec(mc_samples=cfg.samples, seed=cfg.seed), SearchConfig(max_rounds=cfg.max_rounds))
    print(f"phase: {res.phase}")
    print(f"w*: ({res.w_star[0]:.6f}, {res.w_star[1]:.6f})")
    print(f"max excess: {res.max_excess:.6f}")
    for i, (lo, hi) in enumerate(res.box_bounds, 1):
        print(f"w{i} in [{lo:.6f}, {hi:.6f}]")
    print(f"rounds: {res.rounds}, curves evaluated: {len(res.curves)}")
    if cfg.curves_csv:
        res.dump_csv(cfg.curves_csv)
        print(f"curves written to {cfg.curves_csv}")


if __name__ == "__main__":
    main()
