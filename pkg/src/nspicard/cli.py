"""Command-line driver: verification tiers, bounds, and the full solve.

Subcommands
-----------
tableau-verify   exact identities of the equation tableau
freq-verify      frequency-domain rank/nullspace/particular certification
greens-verify    potential, heat-kernel and envelope-integral oracles
bounds           domain capacity, envelope constants, closing inequalities
solve            Picard iteration + reconstruction + residual report
decompose-solve  partition the domain, solve per piece, stitch

Every tier writes structured-text reports (and figures unless --no-plots)
into the output directory.  Runs are deterministic for a fixed config and
seed; figure files and the trace's elapsed column are the only exceptions.

Exit codes: 0 = tier checks pass (for solve: the iteration converged;
the end-to-end residual is diagnostic), 1 = checks failed or error,
2 = refused (closing inequalities fail and --override-smallness not set).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .bounds import bound_constants, smallness_check
from .config import ConfigError, parse_config
from .domain import make_grid
from .engine import (HolderBudget, forcing_potentials, partition_domain,
                     picard)
from .fields import ScalarField
from .heat import HeatPropagator, phi_functions, phi_quadrature
from .potential import ball_box_union, domain_capacity, potential_matrix, \
    PotentialQuadrature
from .presets import make_forcing
from .reconstruction import assemble_global, ns_residual, reconstruct
from .reports import (bounds_report_lines, field_csv, flow_csvs, fmt,
                      freq_summary_lines, greens_report_lines,
                      partition_lines, solve_report_lines,
                      tableau_report_lines, trace_csv, write_report_dir)
from .spectral import certification_csv, certify_frequencies
from .tableau import build_tableau, tableau_dump, verify_tableau
from .wtables import TableContext


def _budget(cfg):
    return HolderBudget(M=cfg.budget_M, C=cfg.budget_C, C1=cfg.budget_C1,
                        alpha=cfg.alpha)


def _context(cfg, grid):
    gs = cfg.grid_spec
    return TableContext(grid, cfg.domain, cfg.mu, cfg.tau, cells=gs.cells,
                        legendre_order=gs.legendre_order,
                        hermite_order=gs.hermite_order)


def _figures_enabled(args):
    return not args.no_plots


# ---------------------------------------------------------------------------
# Tiers
# ---------------------------------------------------------------------------

def _cmd_tableau_verify(cfg, out, args):
    tab = build_tableau(cfg.mu, cfg.tau)
    ver = verify_tableau(tab, np.random.default_rng(cfg.seed))
    write_report_dir(out, {
        "tableau_report.txt": tableau_report_lines(ver),
        "tableau_dump.txt": tableau_dump(tab),
    })
    return 0 if ver.all_ok else 1


def _cmd_freq_verify(cfg, out, args):
    tab = build_tableau(cfg.mu, cfg.tau)
    rng = np.random.default_rng(cfg.seed)
    records = certify_frequencies(tab, rng, n=cfg.samples,
                                  rank_tol=cfg.rank_tol)
    write_report_dir(out, {
        "certification.csv": certification_csv(records),
        "freq_report.txt": freq_summary_lines(records),
    })
    if _figures_enabled(args):
        from .figures import certification_figure
        certification_figure(records, os.path.join(out, "certification.png"))
    return 0 if all(r.ok for r in records) else 1


def _cmd_greens_verify(cfg, out, args):
    results = []

    # coarse lattice ball: a fast smoke of the closed-form values (the
    # acceptance suite runs the tight-tolerance versions)
    R = 0.5
    ball = ball_box_union((0.0, 0.0, 0.0), R, n=16, T=1.0)
    quad_cells = (1, 1, 1)
    quad = PotentialQuadrature(ball, quad_cells)
    ones = np.ones(len(quad.centers))
    v_c = (potential_matrix(quad, [(0.0, 0.0, 0.0)]) @ ones)[0]
    results.append(("uniform-ball potential at center (-R^2/2)",
                    v_c, -R * R / 2.0, 5e-3,
                    abs(v_c - (-R * R / 2)) < 5e-3 * abs(R * R / 2)))
    d = 2.0 * R
    v_d = (potential_matrix(quad, [(d, 0.0, 0.0)]) @ ones)[0]
    tgt = -R**3 / (3.0 * d)
    results.append(("uniform-ball potential outside (-R^3/3d)",
                    v_d, tgt, 5e-3, abs(v_d - tgt) < 5e-3 * abs(tgt)))

    cap, _ = domain_capacity(ball, cells=quad_cells, search=2)
    results.append(("ball capacity (R^2/2)", cap, R * R / 2.0, 5e-3,
                    abs(cap - R * R / 2) < 5e-3 * (R * R / 2)))

    c = 0.7
    prop = HeatPropagator(cfg.mu)
    h = prop.propagate_points(
        lambda t, pts: np.full(len(np.atleast_2d(pts)), c), 0.8,
        [(0.0, 0.0, 0.0)])
    results.append(("constant-source heat identity (c*t)", float(h[0]),
                    c * 0.8, 1e-10, abs(float(h[0]) - c * 0.8) < 1e-10))

    t, tau1 = 1.0, 0.6
    closed = phi_functions(t, tau1)
    numer = phi_quadrature(t, tau1)
    err = max(abs(a - b) for a, b in zip(closed, numer))
    results.append(("envelope integrals: closed form vs quadrature",
                    err, 0.0, 1e-8, err < 1e-8))

    write_report_dir(out, {
        "greens_report.txt": greens_report_lines(results),
    })
    return 0 if all(r[-1] for r in results) else 1


def _cmd_bounds(cfg, out, args):
    budget = _budget(cfg)
    consts = bound_constants(cfg.domain, cfg.domain.T, cfg.mu, cfg.alpha,
                             budget.M, epsilon_trunc=cfg.epsilon_trunc)
    small = smallness_check(consts, budget)
    write_report_dir(out, {
        "bounds_report.txt": bounds_report_lines(consts, small),
    })
    return 0


def _solve_single(cfg, domain, out, args, prefix=""):
    grid = make_grid(domain, counts=cfg.grid_spec.counts)
    ctx = TableContext(grid, domain, cfg.mu, cfg.tau,
                       cells=cfg.grid_spec.cells,
                       legendre_order=cfg.grid_spec.legendre_order,
                       hermite_order=cfg.grid_spec.hermite_order)
    if prefix:
        # restriction of the global forcing to this piece (indicator cut)
        full = make_forcing(cfg.forcing_preset, cfg.domain,
                            **cfg.forcing_params)
        forcing = tuple(
            ScalarField(f, support=domain, name=f.name) for f in full)
    else:
        forcing = make_forcing(cfg.forcing_preset, domain,
                               **cfg.forcing_params)
    budget = _budget(cfg)
    rng = np.random.default_rng(cfg.seed)
    w1 = forcing_potentials(forcing, ctx)
    h, trace = picard(forcing, ctx, budget, tol=cfg.picard_tol,
                      max_iter=cfg.max_iter, rng=rng, w1=w1)
    w2 = ctx.product_table(h.component_sums())
    flow = reconstruct(w1, w2)
    residual = ns_residual(flow, forcing, cfg.mu, cfg.tau)
    files = {f"{prefix}trace.csv": trace_csv(trace)}
    for name, csv_text in flow_csvs(flow).items():
        files[f"{prefix}{name}.csv"] = csv_text
    write_report_dir(out, files)
    return flow, trace, residual, grid


def _cmd_solve(cfg, out, args):
    budget = _budget(cfg)
    consts = bound_constants(cfg.domain, cfg.domain.T, cfg.mu, cfg.alpha,
                             budget.M, epsilon_trunc=cfg.epsilon_trunc)
    small = smallness_check(consts, budget)
    if not small.all_ok and not args.override_smallness:
        write_report_dir(out, {
            "bounds_report.txt": bounds_report_lines(consts, small),
        })
        print("refusing to solve: the closing inequalities fail on this "
              "domain (see bounds_report.txt).", file=sys.stderr)
        print("run 'decompose-solve' to partition the domain first, or "
              "pass --override-smallness.", file=sys.stderr)
        return 2

    flow, trace, residual, _ = _solve_single(cfg, cfg.domain, out, args)
    write_report_dir(out, {
        "solve_report.txt": solve_report_lines(trace, residual, flow, small),
    })
    if _figures_enabled(args):
        from .figures import (field_slices_figure, residual_figure,
                              trace_figure)
        trace_figure(trace, os.path.join(out, "trace.png"))
        field_slices_figure(flow, os.path.join(out, "fields.png"))
        residual_figure(residual, os.path.join(out, "residual.png"))
    return 0 if trace.status == "converged" else 1


def _cmd_decompose_solve(cfg, out, args):
    budget = _budget(cfg)
    result = partition_domain(cfg.domain, cfg.domain.T, cfg.mu, budget,
                              epsilon_trunc=cfg.epsilon_trunc)
    write_report_dir(out, {"partition.txt": partition_lines(result)})
    if _figures_enabled(args):
        from .figures import partition_figure
        partition_figure(result, os.path.join(out, "partition.png"))
    if not result.ok:
        print("partition failed: smallness unreachable at max depth "
              "(see partition.txt)", file=sys.stderr)
        return 2

    pieces = []
    statuses = []
    from .domain import Domain
    for i, box in enumerate(result.domain.boxes):
        piece = Domain.single(box.lo, box.hi, cfg.domain.T)
        flow, trace, _, _ = _solve_single(cfg, piece, out, args,
                                          prefix=f"piece{i}_")
        pieces.append((piece, flow))
        statuses.append(trace.status)

    stitched = assemble_global(pieces)
    grid = make_grid(cfg.domain, counts=cfg.grid_spec.counts)
    pts = grid.spatial_points()
    files = {}
    for name in ("u1", "u2", "u3", "p"):
        values = np.stack([
            stitched.evaluate(name, t, pts).reshape(grid.spatial_shape())
            for t in grid.times
        ])
        files[f"assembled_{name}.csv"] = field_csv(grid, values)
    files["assembly_report.txt"] = [
        "piecewise assembly",
        f"  pieces: {len(pieces)}",
        "  statuses: " + ", ".join(statuses),
        "  interface points carry the undefined marker (NaN) in the "
        "assembled dumps",
    ]
    write_report_dir(out, files)
    return 0 if all(s == "converged" for s in statuses) else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "tableau-verify": _cmd_tableau_verify,
    "freq-verify": _cmd_freq_verify,
    "greens-verify": _cmd_greens_verify,
    "bounds": _cmd_bounds,
    "solve": _cmd_solve,
    "decompose-solve": _cmd_decompose_solve,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="nspicard",
        description="constructive fixed-point pipeline for incompressible "
                    "flow on a space-time box")
    p.add_argument("subcommand", choices=sorted(_COMMANDS))
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", default=None,
                   help="output directory (default: config output_dir)")
    p.add_argument("--seed", type=int, default=None,
                   help="override the config seed")
    p.add_argument("--override-smallness", action="store_true",
                   help="solve even when the closing inequalities fail")
    p.add_argument("--no-plots", action="store_true",
                   help="skip figure rendering")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as f:
            cfg = parse_config(f.read())
    except OSError as e:
        print(f"cannot read config: {e}", file=sys.stderr)
        return 1
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 1
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.subcommand = args.subcommand
    out = args.out if args.out is not None else cfg.output_dir
    os.makedirs(out, exist_ok=True)
    try:
        return _COMMANDS[args.subcommand](cfg, out, args)
    except Exception as e:  # surface with the originating module
        print(f"error [{type(e).__module__}]: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
