"""Run configuration: JSON document -> validated RunConfig.

Strict parsing: unknown keys are rejected with their full path, missing
required keys and invariant violations name the offending key.  The seed
is mandatory so that every sampled certification is reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .domain import Domain, GridSpec


class ConfigError(ValueError):
    pass


_SCHEMA = {
    "domain": {"lo", "hi", "T"},
    "physics": {"mu", "rho"},
    "grid": {"counts", "cells", "hermite_order", "legendre_order"},
    "budget": {"M", "C", "C1", "alpha", "epsilon_trunc"},
    "forcing": {"preset", "amplitude", "center", "radius", "width",
                "direction"},
    "tolerances": {"picard_tol", "rank_tol", "max_iter", "refine_levels"},
    "samples": None,
    "seed": None,
    "output_dir": None,
}


@dataclass
class RunConfig:
    domain: Domain
    mu: float
    rho: float
    tau: float
    grid_spec: GridSpec
    budget_M: float = 1.0
    budget_C: float = 2.0
    budget_C1: float = 0.5
    alpha: float = 0.5
    epsilon_trunc: float = None
    forcing_preset: str = "zero"
    forcing_params: dict = field(default_factory=dict)
    picard_tol: float = 1e-8
    rank_tol: float = 1e-8
    max_iter: int = 50
    refine_levels: int = 2
    samples: int = 120
    seed: int = 0
    output_dir: str = "out"
    subcommand: str = None


def _reject_unknown(doc):
    for key, val in doc.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown configuration key {key!r}")
        sub = _SCHEMA[key]
        if sub is not None:
            if not isinstance(val, dict):
                raise ConfigError(f"{key!r} must be a table of settings")
            for k2 in val:
                if k2 not in sub:
                    raise ConfigError(f"unknown configuration key "
                                      f"'{key}.{k2}'")


def _require(doc, key, path):
    if key not in doc:
        raise ConfigError(f"missing required key '{path}'")
    return doc[key]


def _positive(value, path):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{path}' must be a number") from None
    if v <= 0:
        raise ConfigError(f"'{path}' must be positive, got {value}")
    return v


def parse_config(text: str) -> RunConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"configuration is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    _reject_unknown(doc)

    dom = _require(doc, "domain", "domain")
    lo = tuple(_require(dom, "lo", "domain.lo"))
    hi = tuple(_require(dom, "hi", "domain.hi"))
    T = _positive(_require(dom, "T", "domain.T"), "domain.T")
    try:
        domain = Domain.single(lo, hi, T)
    except ValueError as e:
        raise ConfigError(f"'domain': {e}") from None

    phys = _require(doc, "physics", "physics")
    mu = _positive(_require(phys, "mu", "physics.mu"), "physics.mu")
    rho = _positive(_require(phys, "rho", "physics.rho"), "physics.rho")
    tau = 1.0 / rho

    grid = doc.get("grid", {})
    try:
        grid_spec = GridSpec(
            counts=tuple(grid.get("counts", (9, 9, 9, 9))),
            cells=grid.get("cells", (10, 10, 10)),
            hermite_order=grid.get("hermite_order", 10),
            legendre_order=grid.get("legendre_order", 16),
        )
    except ValueError as e:
        raise ConfigError(f"'grid': {e}") from None

    budget = doc.get("budget", {})
    alpha = float(budget.get("alpha", 0.5))
    if not 0 < alpha < 1:
        raise ConfigError("'budget.alpha' must lie in (0, 1)")
    M = _positive(budget.get("M", 1.0), "budget.M")
    C1 = float(budget.get("C1", M / 2.0))
    C = float(budget.get("C", max(2.0 * C1, 1.0)))
    if C1 < 0 or C < 2.0 * C1:
        raise ConfigError("'budget' must satisfy C >= 2*C1 >= 0")
    eps = budget.get("epsilon_trunc")
    if eps is not None:
        eps = _positive(eps, "budget.epsilon_trunc")
        if eps >= T:
            raise ConfigError("'budget.epsilon_trunc' must be < domain.T")

    forcing = doc.get("forcing", {"preset": "zero"})
    preset = forcing.get("preset", "zero")
    fparams = {k: v for k, v in forcing.items() if k != "preset"}

    tols = doc.get("tolerances", {})
    picard_tol = _positive(tols.get("picard_tol", 1e-8),
                           "tolerances.picard_tol")
    rank_tol = _positive(tols.get("rank_tol", 1e-8), "tolerances.rank_tol")
    max_iter = int(tols.get("max_iter", 50))
    if max_iter < 1:
        raise ConfigError("'tolerances.max_iter' must be >= 1")
    refine = int(tols.get("refine_levels", 2))

    if "seed" not in doc:
        raise ConfigError("missing required key 'seed'")
    seed = int(doc["seed"])

    samples = int(doc.get("samples", 120))
    if samples < 1:
        raise ConfigError("'samples' must be >= 1")

    return RunConfig(
        domain=domain, mu=mu, rho=rho, tau=tau, grid_spec=grid_spec,
        budget_M=M, budget_C=C, budget_C1=C1, alpha=alpha,
        epsilon_trunc=eps, forcing_preset=preset, forcing_params=fparams,
        picard_tol=picard_tol, rank_tol=rank_tol, max_iter=max_iter,
        refine_levels=refine, samples=samples, seed=seed,
        output_dir=doc.get("output_dir", "out"),
    )
