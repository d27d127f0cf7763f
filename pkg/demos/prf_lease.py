"""Lease an unpredictable-function key and evaluate away from its hidden targets.

Run: python3 demos/prf_lease.py [--seed N]
"""
import argparse

from skl.prf_skl import shadow_targets, upf_del, upf_delvrfy, upf_eval, upf_keygen, upf_leval
from skl.rng import Rng


def main(seed: int) -> None:
    rng = Rng(seed)
    n, ell = 8, 8
    msk, sk, dvk = upf_keygen(n, ell, rng)
    targets = shadow_targets(msk)
    print(f"leased key: {n} legs, {ell}-bit input blocks")

    snapshot = sk.to_bytes()
    agree = 0
    for _ in range(200):
        s = rng.bits(n * ell)
        if any((s >> (i * ell)) & 0xFF == t for i, t in enumerate(targets)):
            continue  # an input block on a hidden target would disturb that leg
        agree += upf_leval(sk, s, rng) == upf_eval(msk, s)
    print(f"leased evaluation agreed with the master key on {agree} inputs")
    print("key state unchanged:", sk.to_bytes() == snapshot)
    print("deletion verified:", upf_delvrfy(dvk, upf_del(sk, rng)))


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=1)
    main(ap.parse_args().seed)
