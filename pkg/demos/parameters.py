"""Check the lattice parameter conditions for the toy preset and a broken variant.

Run: python3 demos/parameters.py
"""
from skl.lattice.params import preset, validate_params


def main() -> None:
    toy = preset("toy")
    for line in validate_params(toy).lines():
        print(line)
    broken = toy.with_(beta_sis=toy.q)
    print("with beta_SIS raised to q, failing conditions:", validate_params(broken).failed())


if __name__ == "__main__":
    main()
