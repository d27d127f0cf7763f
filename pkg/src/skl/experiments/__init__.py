"""Executable leasing security games, reference adversaries and seeded sweeps."""
from .adversaries import ADVERSARIES, BasisHoarder, CertForger, HonestDeleter, VraAdversary, get_adversary
from .games import (
    GAMES,
    ContractViolation,
    Trial,
    run_game,
    run_ind_vra,
    run_ow_vra,
    run_pr_vra,
    run_ruf_vra,
    run_up_vra,
)
from .schemes import DsScheme, Keys, PkeScheme, PrfScheme, UpfScheme, make_scheme
from .sweep import ALL_GAMES, ExperimentSpec, SweepResult, SweepRow, max_threads, sweep

__all__ = [
    "ADVERSARIES",
    "ALL_GAMES",
    "BasisHoarder",
    "CertForger",
    "ContractViolation",
    "DsScheme",
    "ExperimentSpec",
    "GAMES",
    "HonestDeleter",
    "Keys",
    "PkeScheme",
    "PrfScheme",
    "SweepResult",
    "SweepRow",
    "Trial",
    "UpfScheme",
    "VraAdversary",
    "get_adversary",
    "make_scheme",
    "max_threads",
    "run_game",
    "run_ind_vra",
    "run_ow_vra",
    "run_pr_vra",
    "run_ruf_vra",
    "run_up_vra",
    "sweep",
]
