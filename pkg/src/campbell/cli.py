"""Command-line interface emitting plot-ready CSV/JSON tables.

Commands: mesh, nodes, local, surface, ep-atlas, string-atlas, shaft, verify.
Outputs are deterministic: identical configurations produce byte-identical
files.  Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import circular_string as cstring
from . import ep as ep_mod
from .linalg import EigenSolverError
from .mesh import enumerate_nodes, sample_branches
from .model import BUNDLED_MODELS, RotorModel, load_model, shaft_model
from .oracle import (convergence_order, eigen_approx, exact_spectrum,
                     hausdorff_pair_distance, nearest_pair, sweep, sweep_rows)
from .perturb import expansion_coefficients, pencil_roots, reduced_pencil

_VERIFY_SEED = 20240229


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p):
    p.add_argument("--model", default="6dof",
                   help="bundled model name (6dof, shaft) or a JSON file path")
    p.add_argument("--omega-min", type=float, default=None)
    p.add_argument("--omega-max", type=float, default=None)
    p.add_argument("--omega-steps", type=int, default=201)
    p.add_argument("--kappa-min", type=float, default=None)
    p.add_argument("--kappa-max", type=float, default=None)
    p.add_argument("--kappa-steps", type=int, default=101)
    p.add_argument("--delta", type=float, default=0.0, help="damping scale")
    p.add_argument("--kappa", type=float, default=0.0, help="stiffness scale")
    p.add_argument("--nu", type=float, default=0.0, help="circulatory scale")
    p.add_argument("--node", type=int, default=None, help="node id from the nodes table")
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> _Parser:
    parser = _Parser(prog="campbell", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("mesh", "analytic branch samples over a speed range"),
        ("nodes", "crossing table with regime and signature tags"),
        ("local", "expansion coefficients and EP data at one node"),
        ("surface", "approximate and exact eigenvalue sheets near one node"),
        ("ep-atlas", "exceptional-point table for all nodes"),
        ("string-atlas", "exceptional points of the rotating circular string"),
        ("shaft", "speed sweep of the two-degree-of-freedom shaft"),
        ("verify", "run convergence and two-path agreement suites"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_common(p)
        if name == "mesh":
            p.add_argument("--full-spectrum", action="store_true",
                           help="include branches with negative frequency")
        if name == "nodes":
            p.add_argument("--full-spectrum", action="store_true")
        if name == "string-atlas":
            p.add_argument("--d", type=float, default=0.3, help="eyelet damping")
            p.add_argument("--mu", type=float, default=0.0, help="eyelet friction")
            p.add_argument("--n-max", type=int, default=10)
        if name == "shaft":
            p.add_argument("--m", type=float, default=1.0)
            p.add_argument("--k1", type=float, default=4.0)
            p.add_argument("--mu1", type=float, default=0.0)
            p.add_argument("--mu2", type=float, default=0.0)
            p.add_argument("--beta", type=float, default=0.0)
    return parser


def _load(args) -> RotorModel:
    if args.model in BUNDLED_MODELS:
        model = BUNDLED_MODELS[args.model]()
    else:
        model = load_model(args.model)
    return model.with_scales(delta=args.delta, kappa=args.kappa, nu=args.nu)


def _omega_range(args, default=(0.0, 2.5)):
    lo = args.omega_min if args.omega_min is not None else default[0]
    hi = args.omega_max if args.omega_max is not None else default[1]
    if not lo <= hi or args.omega_steps < 1:
        raise ValueError("speed range must be ordered with steps >= 1")
    return lo, hi


def _grid(lo, hi, steps):
    return [float(x) for x in np.linspace(lo, hi, steps)]


def _to_cell(v):
    if v is None:
        return None
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return str(v)


def write_table(out, command, columns, rows, fmt):
    rows = [[_to_cell(v) for v in row] for row in rows]
    if fmt == "json":
        text = json.dumps({"command": command, "columns": list(columns), "rows": rows},
                          indent=1)
        text += "\n"
    else:
        import io
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v
                             for v in row])
        text = buf.getvalue()
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _nodes_for(model, args, default_range=(0.0, 2.5), full=False):
    lo, hi = _omega_range(args, default_range)
    return enumerate_nodes(model.omegas, (lo, hi), include_negative_frequency=full)


def cmd_mesh(args) -> int:
    model = _load(args)
    lo, hi = _omega_range(args)
    rows = sample_branches(model.omegas, _grid(lo, hi, args.omega_steps),
                           upper_half_plane=not args.full_spectrum)
    write_table(args.out, "mesh", ("Omega", "s", "alpha", "eps", "Im_lambda"),
                rows, args.format)
    return 0


_NODE_COLUMNS = ("node_id", "Omega0", "omega0", "s", "alpha", "eps", "t", "beta",
                 "sigma", "sig_product", "regime", "clustered")


def _node_row(node_id, nd):
    a, b = nd.branch_a, nd.branch_b
    return (node_id, nd.Omega0, nd.omega0, a.s, a.alpha, a.eps, b.s, b.alpha,
            b.eps, nd.sig_product, nd.regime, nd.clustered)


def cmd_nodes(args) -> int:
    model = _load(args)
    nodes = _nodes_for(model, args, full=args.full_spectrum)
    rows = [_node_row(i, nd) for i, nd in enumerate(nodes)]
    write_table(args.out, "nodes", _NODE_COLUMNS, rows, args.format)
    return 0


def _pick_node(args, nodes):
    if args.node is None:
        raise ValueError("--node is required for this command")
    if not 0 <= args.node < len(nodes):
        raise LookupError(f"node id {args.node} outside 0..{len(nodes) - 1}")
    return nodes[args.node]


def cmd_local(args) -> int:
    model = _load(args)
    nodes = _nodes_for(model, args)
    nd = _pick_node(args, nodes)
    exp = expansion_coefficients(nd, model)
    columns = ["node_id", "Omega0", "omega0", "sig_product", "regime",
               "A1_re", "A1_im", "A2_re", "A2_im", "B1_re", "B1_im",
               "B2_re", "B2_im", "trK_ss", "trK_tt", "trK_st_J", "trK_st_I",
               "Omega_EP_plus", "kappa_EP_plus", "Omega_EP_minus",
               "kappa_EP_minus", "exists", "class"]
    try:
        pair = ep_mod.exceptional_points(nd, model, args.delta, args.nu)
        ep_cells = ([pair.Omega_ep_plus, pair.kappa_ep_plus, pair.Omega_ep_minus,
                     pair.kappa_ep_minus] if pair.exists else [None] * 4)
        ep_cells += [pair.exists, pair.classification.value]
    except (ValueError, ep_mod.DegenerateDiscriminantError):
        ep_cells = [None] * 4 + [False, "degenerate"]
    row = [args.node, nd.Omega0, nd.omega0, nd.sig_product, nd.regime,
           exp.A1.real, exp.A1.imag, exp.A2.real, exp.A2.imag,
           exp.B1.real, exp.B1.imag, exp.B2.real, exp.B2.imag,
           exp.trK_ss, exp.trK_tt, exp.trK_st_J, exp.trK_st_I, *ep_cells]
    write_table(args.out, "local", columns, [row], args.format)
    return 0


def _match_pairs(approx, exact):
    a0, a1 = approx
    e0, e1 = exact
    if abs(a0 - e0) + abs(a1 - e1) <= abs(a0 - e1) + abs(a1 - e0):
        return (e0, e1)
    return (e1, e0)


def cmd_surface(args) -> int:
    model = _load(args)
    nodes = _nodes_for(model, args)
    nd = _pick_node(args, nodes)
    window = 5.0 * max(abs(args.kappa), abs(args.delta) * abs(nd.omega0),
                       abs(args.nu))
    window = max(window, 0.05)
    om_lo = args.omega_min if args.omega_min is not None else nd.Omega0 - window
    om_hi = args.omega_max if args.omega_max is not None else nd.Omega0 + window
    ka_lo = args.kappa_min if args.kappa_min is not None else -window
    ka_hi = args.kappa_max if args.kappa_max is not None else window
    if args.omega_steps < 1 or args.kappa_steps < 1 or om_lo > om_hi or ka_lo > ka_hi:
        raise ValueError("surface grid is empty or unordered")
    rows = []
    for kappa in _grid(ka_lo, ka_hi, args.kappa_steps):
        scaled = model.with_scales(kappa=kappa)
        for omega in _grid(om_lo, om_hi, args.omega_steps):
            approx = eigen_approx(nd, model, omega, args.delta, kappa, args.nu)
            exact = _match_pairs(approx, nearest_pair(nd, scaled, omega))
            for branch_id, (ap, ex) in enumerate(zip(approx, exact)):
                rows.append((omega, kappa, branch_id, ap.real, ap.imag,
                             ex.real, ex.imag))
    write_table(args.out, "surface",
                ("Omega", "kappa", "branch", "Re_lambda_approx", "Im_lambda_approx",
                 "Re_lambda_exact", "Im_lambda_exact"), rows, args.format)
    return 0


def cmd_ep_atlas(args) -> int:
    model = _load(args)
    nodes = _nodes_for(model, args)
    rows = ep_mod.ep_atlas(nodes, model, args.delta, args.nu)
    write_table(args.out, "ep-atlas",
                ("node_id", "Omega0", "omega0", "sig_product", "Omega_EP_plus",
                 "kappa_EP_plus", "Omega_EP_minus", "kappa_EP_minus", "exists",
                 "class"), rows, args.format)
    return 0


def cmd_string_atlas(args) -> int:
    lo, hi = _omega_range(args, default=(-1.0, 1.0))
    eps = cstring.butterfly_atlas(args.d, args.mu, args.n_max, (lo, hi))
    rows = cstring.string_atlas_rows(eps)
    write_table(args.out, "string-atlas",
                ("n", "m", "eps", "delta", "Omega0", "omega0", "Omega_EP",
                 "kappa_EP", "Re_lambda_EP", "Im_lambda_EP_plus",
                 "Im_lambda_EP_minus"), rows, args.format)
    return 0


def cmd_shaft(args) -> int:
    model = shaft_model(args.m, args.k1, kappa=args.kappa, mu1=args.mu1,
                        mu2=args.mu2, beta=args.beta)
    lo, hi = _omega_range(args, default=(-3.0, 3.0))
    samples = sweep(model, _grid(lo, hi, args.omega_steps))
    write_table(args.out, "shaft",
                ("Omega", "kappa", "track_id", "Re_lambda", "Im_lambda"),
                sweep_rows(samples), args.format)
    return 0


def cmd_verify(args) -> int:
    model = _load(args)
    nodes = _nodes_for(model, args)
    rows = []
    columns = ("suite", "node_id", "metric", "value", "threshold", "status")
    scales_zero = args.delta == 0.0 and args.kappa == 0.0 and args.nu == 0.0
    if scales_zero:
        rows.append(("convergence", None, "slope", None, 1.8, "skipped"))
        rows.append(("two-path", None, "max_rel_dev", None, 1e-10, "skipped"))
        write_table(args.out, "verify", columns, rows, args.format)
        return 0
    picks = []
    for want in ("subcritical-definite", "mixed", "critical-standstill"):
        for i, nd in enumerate(nodes):
            if nd.clustered:
                continue
            if want == "subcritical-definite" and nd.regime == "subcritical" \
                    and nd.sig_product > 0 and nd.Omega0 > 0:
                picks.append((i, nd)); break
            if want == "mixed" and nd.sig_product < 0 and nd.regime == "supercritical":
                picks.append((i, nd)); break
            if want == "critical-standstill" and nd.Omega0 == 0.0:
                picks.append((i, nd)); break
    direction = (args.kappa, args.delta, args.nu, max(abs(args.kappa),
                 abs(args.delta), abs(args.nu)))
    for i, nd in picks:
        rep = convergence_order(nd, model, direction, [0.04, 0.02, 0.01, 0.005],
                                node_id=str(i))
        rows.append(("convergence", i, "slope", rep.fitted_slope, 1.8,
                     "pass" if rep.fitted_slope >= 1.8 else "fail"))
    rng = np.random.default_rng(_VERIFY_SEED)
    for i, nd in enumerate(nodes):
        if nd.clustered:
            continue
        worst = 0.0
        for _ in range(100):
            d, k, v, dw = rng.uniform(-0.02, 0.02, size=4)
            trial = model.with_scales(delta=d, kappa=k, nu=v)
            lam_formula = eigen_approx(nd, model, nd.Omega0 + dw, d, k, v)
            q, r = reduced_pencil(nd, trial, nd.Omega0 + dw)
            lam_roots = pencil_roots(q, r, 1j * nd.omega0)
            direct = max(abs(lam_formula[0] - lam_roots[0]),
                         abs(lam_formula[1] - lam_roots[1]))
            swapped = max(abs(lam_formula[0] - lam_roots[1]),
                          abs(lam_formula[1] - lam_roots[0]))
            scale = max(1.0, *(abs(x) for x in lam_roots))
            worst = max(worst, min(direct, swapped) / scale)
        rows.append(("two-path", i, "max_rel_dev", worst, 1e-10,
                     "pass" if worst <= 1e-10 else "fail"))
    write_table(args.out, "verify", columns, rows, args.format)
    return 0 if all(r[-1] != "fail" for r in rows) else 2


_COMMANDS = {
    "mesh": cmd_mesh,
    "nodes": cmd_nodes,
    "local": cmd_local,
    "surface": cmd_surface,
    "ep-atlas": cmd_ep_atlas,
    "string-atlas": cmd_string_atlas,
    "shaft": cmd_shaft,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, LookupError, OSError) as exc:
        print(f"campbell: error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, EigenSolverError, np.linalg.LinAlgError) as exc:
        print(f"campbell: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
