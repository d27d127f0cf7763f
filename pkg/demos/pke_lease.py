"""Lease a decryption key, use it, return it, and catch a cheater.

Run: python3 demos/pke_lease.py [--seed N]
"""
import argparse

from skl.deletion import random_certificate
from skl.pke_base import REFERENCE
from skl.pke_skl import skl_check, skl_dec, skl_del, skl_enc, skl_keygen
from skl.rng import Rng


def main(seed: int) -> None:
    rng = Rng(seed)
    n = 16
    pk, dk, dvk = skl_keygen(n, REFERENCE, rng)
    print(f"leased a {n}-leg decryption key; {bin(dvk.theta).count('1')} legs sit in the Hadamard basis")

    snapshot = dk.to_bytes()
    for _ in range(3):
        m = rng.bits(n)
        got = skl_dec(dk, skl_enc(pk, m, rng), rng)
        print(f"  message {m:0{n}b} -> decrypted {got:0{n}b}")
    print("key state unchanged by decryption:", dk.to_bytes() == snapshot)

    cert = skl_del(dk, rng)
    print("honest return, verdict:", skl_check(dvk, cert).name)

    pk2, dk2, dvk2 = skl_keygen(n, REFERENCE, rng)
    forged = random_certificate(n, dvk2.dk_len, rng)
    print("guessed certificate while keeping the key, verdict:", skl_check(dvk2, forged).name)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=1)
    main(ap.parse_args().seed)
