"""Sign with a leased static key on the small lattice preset, then return it.

Run: python3 demos/signature_lease.py [--seed N]
"""
import argparse

from skl.ds_skl import ds_del, ds_delvrfy, ds_keygen, ds_shadow_targets, ds_sign, ds_sigvrfy
from skl.lattice.params import preset
from skl.rng import Rng


def main(seed: int) -> None:
    rng = Rng(seed)
    params = preset("small")
    n, tb = 3, params.table_bits
    sk, vks = ds_keygen(n, params, rng)
    targets = ds_shadow_targets(sk)
    print(f"leased signing key: {n} legs, {tb}-bit message blocks, q = {params.q}")

    snapshot = sk.to_bytes()
    for j in range(4):
        m = 0
        for i in range(n):
            s = rng.below((1 << tb) - 1)
            m |= (s + (s >= targets[i])) << (i * tb)
        _, sig = ds_sign(sk, m, rng)
        print(f"  message {m:0{n * tb}b}: signature verifies = {ds_sigvrfy(vks.svk, m, sig)}")
    print("key state unchanged after signing:", sk.to_bytes() == snapshot)
    print("deletion verified:", ds_delvrfy(vks.dvk, ds_del(sk, rng)))


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=1)
    main(ap.parse_args().seed)
