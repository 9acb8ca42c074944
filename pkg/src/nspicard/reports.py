"""Deterministic text/CSV report emission.

Reports into an output directory: structured text naming the identity each
number certifies, and comma-separated dumps for fields and traces.  All
floats go through ``%.17g`` (shortest round-trip), so identical inputs
produce bit-identical files.  The only wall-clock content is the trace's
elapsed column, which is explicitly exempt from determinism comparisons.
"""

from __future__ import annotations

import io
import os


def fmt(x):
    return "%.17g" % float(x)


def write_text(path, lines):
    with open(path, "w") as f:
        for line in lines:
            f.write(line + "\n")
    return path


# ---------------------------------------------------------------------------
# CSV dumps
# ---------------------------------------------------------------------------

def trace_csv(trace) -> str:
    out = io.StringIO()
    out.write("iteration,delta,sup_norm,holder_constant,in_omega,elapsed\n")
    for r in trace.records:
        out.write(f"{r.index},{fmt(r.delta)},{fmt(r.sup)},{fmt(r.holder)},"
                  f"{int(r.in_omega)},{r.elapsed:.6f}\n")
    return out.getvalue()


def field_csv(grid, values) -> str:
    """One scalar field as t,x1,x2,x3,value rows (C-order sweep)."""
    out = io.StringIO()
    out.write("t,x1,x2,x3,value\n")
    pts = grid.spatial_points()
    for i, t in enumerate(grid.times):
        flat = values[i].ravel()
        ts = fmt(t)
        for (x1, x2, x3), v in zip(pts, flat):
            out.write(f"{ts},{fmt(x1)},{fmt(x2)},{fmt(x3)},{fmt(v)}\n")
    return out.getvalue()


def flow_csvs(flow) -> dict:
    return {name: field_csv(flow.grid, arr)
            for name, arr in flow.components().items()}


# ---------------------------------------------------------------------------
# Structured-text reports
# ---------------------------------------------------------------------------

def tableau_report_lines(ver):
    yield "tableau verification"
    yield ("  equation rows annihilate the null family (A . A_eta = 0 "
           "exactly): " + ("pass" if ver.product_annihilates else "FAIL"))
    yield (f"  null-family rank: {ver.basis_rank} (expected 55): "
           + ("pass" if ver.basis_rank == 55 else "FAIL"))
    yield ("  carrier and derivative rows match dictionary generation: "
           + ("pass" if not ver.row_failures else
              "FAIL " + ", ".join(ver.row_failures)))
    yield ("  equation-row sparsity patterns match dictionary: "
           + ("pass" if ver.alpha_pattern_ok else "FAIL"))
    yield ("  particular vector solves the extended system for sampled "
           "forcing: " + ("pass" if ver.particular_ok else "FAIL"))


def freq_summary_lines(records, rank_expected=46):
    ok = all(r.ok for r in records)
    ranks_ok = all(r.rank == rank_expected for r in records)
    yield "frequency-domain certification"
    yield f"  sampled frequencies: {len(records)}"
    yield (f"  rank(B) = {rank_expected} off the spatial-zero set: "
           + ("pass" if ranks_ok else "FAIL"))
    yield ("  max relative null-family residual ||B eta|| / ||B||: "
           + fmt(max(r.null_residual for r in records)))
    yield ("  max relative particular residual ||B Y1 - G|| / ||G||: "
           + fmt(max(r.particular_residual for r in records)))
    yield ("  max transformed mass-conservation value "
           "|i xi . (y3, y7, y11)|: "
           + fmt(max(r.divergence_residual for r in records)))
    yield ("  min singular value of the stacked null family: "
           + fmt(min(r.eta_min_singular for r in records)))
    yield "  overall: " + ("pass" if ok else "FAIL")


def bounds_report_lines(consts, small=None):
    yield "envelope constants"
    yield f"  domain capacity M(K1) = {fmt(consts.M_K1)}"
    yield (f"  truncation epsilon = {fmt(consts.epsilon_trunc)}"
           "  (the first two Gaussian envelope integrals diverge as "
           "tau1 -> t; envelopes below use the truncated region)")
    yield (f"  M' = {fmt(consts.Mp)}   M'' = {fmt(consts.Mpp)}   "
           f"M''' = {fmt(consts.Mppp)} (odd moments vanish)")
    yield f"  M_T1 = {fmt(consts.M_T1)} (lifted-field sup envelope)"
    yield (f"  M_T2 = {fmt(consts.M_T2)} (single-lift derivative-table "
           "envelope)")
    yield (f"  M_T3 = {fmt(consts.M_T3)} (grouped-table envelope: 4 terms "
           "x 3 products)")
    yield (f"  M_T4 = {fmt(consts.M_T4)} = 4 M_T3 diam^(1-alpha), "
           f"diam = {fmt(consts.diam)}")
    yield ("  heat derivative envelopes E_0..E_5: "
           + " ".join(fmt(e) for e in consts.envelopes))
    if small is not None:
        yield "closing inequalities (ball invariance and contraction)"
        for line in small.lines():
            yield "  " + line


def solve_report_lines(trace, residual, flow, small=None):
    yield "solve summary"
    yield f"  terminal status: {trace.status}"
    yield f"  iterations: {len(trace.records)}"
    if trace.records:
        yield f"  final delta: {fmt(trace.records[-1].delta)}"
        r = trace.ratios()
        if len(r):
            yield f"  last delta ratio: {fmt(r[-1])}"
    for name, sup in flow.sup_norms().items():
        yield f"  sup |{name}| = {fmt(sup)}"
    if small is not None:
        for line in small.lines():
            yield "  " + line
    for line in residual.summary_lines():
        yield "  " + line
    yield ("  note: the residual measures how closely the reconstruction "
           "satisfies mass/momentum balance; it is diagnostic, not a gate")


def partition_lines(result):
    yield "domain partition (octant bisection until the closing "\
          "inequalities pass)"
    yield f"  pieces: {len(result.domain.boxes)}"
    yield f"  bisection depth used: {result.depth_used}"
    yield "  all pieces pass: " + ("yes" if result.ok else "NO")
    for i, (box, rep) in enumerate(zip(result.domain.boxes, result.reports)):
        lo = ",".join(fmt(v) for v in box.lo)
        hi = ",".join(fmt(v) for v in box.hi)
        yield (f"  piece {i}: lo=({lo}) hi=({hi}) "
               f"contraction={fmt(rep.contraction_lhs)} "
               + ("pass" if rep.all_ok else "fail"))
    if result.worst is not None:
        yield ("  worst failing piece: contraction factor "
               + fmt(result.worst.contraction_lhs)
               + f", sup-row slack {fmt(result.worst.row1_rhs - result.worst.row1_lhs)}")


def greens_report_lines(results):
    """results: list of (label, value, target, tol, ok)."""
    yield "potential / heat / envelope-integral oracle suite"
    for label, value, target, tol, ok in results:
        yield (f"  {label}: value={fmt(value)} target={fmt(target)} "
               f"tol={fmt(tol)}: " + ("pass" if ok else "FAIL"))


def write_report_dir(out_dir, named_texts):
    """Write a dict of filename -> text/lines under out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, content in named_texts.items():
        path = os.path.join(out_dir, name)
        if isinstance(content, str):
            with open(path, "w") as f:
                f.write(content)
        else:
            write_text(path, content)
        written.append(path)
    return written
