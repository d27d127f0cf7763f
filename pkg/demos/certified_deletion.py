"""Win rates of the shipped certified-deletion strategies against their exact values.

Run: python3 demos/certified_deletion.py [--seed N]
"""
import argparse

from skl.bb84 import STRATEGIES, mean_win, run_cdbb84
from skl.rng import trial_rng


def main(seed: int) -> None:
    trials = 2000
    print(f"{'n':>3} {'strategy':<16} {'empirical':>9} {'exact':>9}")
    for n in (2, 4, 8):
        for k, (name, cls) in enumerate(STRATEGIES.items()):
            adv = cls()
            wins = sum(run_cdbb84(n, adv, trial_rng(seed, t, k)).won for t in range(trials))
            print(f"{n:>3} {name:<16} {wins / trials:>9.4f} {mean_win(name, n):>9.4f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=1)
    main(ap.parse_args().seed)
