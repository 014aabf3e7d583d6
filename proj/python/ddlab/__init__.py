"""BDDC and FETI-DP verification on a substructured Q1 Poisson problem."""

import json

from ._ddlab import (
    EmptyCoarseSpace,
    NotPositiveDefinite,
    gen_eig_spd,
    spectra,
    sym_eig,
)
from . import _ddlab


def run(nx=2, ny=2, m=2, coarse="corners", scaling="multiplicity", rho_ratio=1.0,
        tol=1e-12, maxit=1000, seed=0, stage="all"):
    """Build an instance and return the report as a dict."""
    return json.loads(_ddlab.run_json(nx, ny, m, coarse, scaling, rho_ratio, tol, maxit, seed, stage))


def harness(instances=200, n_max=30, seed=7, fault=False):
    """Run the randomized lemma checks and return the summary as a dict."""
    return json.loads(_ddlab.harness_json(instances, n_max, seed, fault))


__all__ = [
    "EmptyCoarseSpace",
    "NotPositiveDefinite",
    "gen_eig_spd",
    "harness",
    "run",
    "spectra",
    "sym_eig",
]
