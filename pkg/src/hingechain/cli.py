"""Command-line interface.

Subcommands: fk, reach, critical, classify, panel, bound.  All commands
are deterministic given the input file, flags, and seed.  Exit codes:
0 success, 2 validation/parse error, 3 convergence failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import critical as crit
from . import panel as panel_mod
from . import reach as reach_mod
from .chain import (
    CRITICAL_GRAD_REL_TOL,
    ZERO_VALUE_REL_TOL,
    end_point,
    gradient,
    hessian_numeric,
    hinge_placement,
    normalize_theta,
    squared_distance,
)
from .chainfile import load_chain
from .errors import HingeChainError, NoConvergence, NotIncident, ZeroValue
from .panel import PanelChainSpec
from .report import render

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NO_CONVERGENCE = 3


def _parse_theta(text, n):
    try:
        values = [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise HingeChainError(f"bad --theta value: {exc}") from None
    if len(values) != n:
        raise HingeChainError(f"--theta needs {n} angles, got {len(values)}")
    return np.array(values)


def _load(path):
    loaded = load_chain(path)
    if isinstance(loaded, PanelChainSpec):
        return loaded, loaded.chain
    return None, loaded


def _base_tolerances(chain):
    return {
        "zero_value_rel": ZERO_VALUE_REL_TOL,
        "critical_grad_rel": CRITICAL_GRAD_REL_TOL,
        "incidence_rel": crit.INCIDENCE_REL_TOL,
        "ordering_slack": crit.ORDER_TOL,
        "dedup_rad": crit.DEDUP_TOL,
        "scale": chain.scale,
    }


def _params_cells(params, n):
    if params is None:
        return ["" for _ in range(n)]
    return [float(v) if np.isfinite(v) else "parallel" for v in params]


def cmd_fk(args):
    panel, chain = _load(args.file)
    theta = normalize_theta(chain, _parse_theta(args.theta, chain.n))
    e = end_point(chain, theta)
    rows = []
    for i in range(chain.n):
        placed = hinge_placement(chain, theta, i)
        rows.append(
            [i, " ".join(repr(float(v)) for v in placed.base)]
            + [" ".join(repr(float(v)) for v in row) for row in placed.directions]
        )
    report = {
        "command": "fk",
        "tolerances": _base_tolerances(chain),
        "inputs": {"file": args.file, "theta": [float(v) for v in theta]},
        "results": {
            "endpoint": [float(v) for v in e],
            "squared_distance": float(e @ e),
            "distance": float(np.linalg.norm(e)),
        },
        "tables": {
            "hinge_placements": {
                "columns": ["hinge", "base"]
                + [f"direction_{j}" for j in range(chain.dimension - 2)],
                "rows": rows,
            }
        },
    }
    print(render(report, args.format), end="")
    return EXIT_OK


def cmd_reach(args):
    panel, chain = _load(args.file)
    result = reach_mod.max_reach(chain, tol=args.tol, max_sweeps=args.max_sweeps)
    cert = result.certification
    report = {
        "command": "reach",
        "tolerances": dict(
            _base_tolerances(chain),
            sweep_tol=args.tol if args.tol is not None else reach_mod.SWEEP_REL_TOL * chain.scale,
        ),
        "inputs": {"file": args.file, "max_sweeps": args.max_sweeps},
        "results": {
            "max_distance": result.max_distance,
            "theta_star": [float(v) for v in result.theta_star],
            "certified": bool(cert.certified),
            "certification_reason": cert.reason or "",
            "ordering_params": _params_cells(result.ordering_params, chain.n),
        },
        "tables": {
            "witness_points": {
                "columns": ["hinge"] + [f"x{j}" for j in range(chain.dimension)],
                "rows": [
                    [i] + [float(v) for v in p]
                    for i, p in enumerate(result.witness.points)
                ],
            }
        },
    }
    print(render(report, args.format), end="")
    return EXIT_OK


def _census_report(chain, census, args):
    rows = []
    for rec in census.records:
        cls = crit.classify(rec)
        rows.append(
            [" ".join(repr(float(v)) for v in rec.theta)]
            + [
                rec.value,
                rec.grad_norm,
                "" if rec.index is None else rec.index,
                cls.kind,
                ""
                if rec.params_a is None
                else " ".join(
                    repr(float(v)) if np.isfinite(v) else "parallel"
                    for v in rec.params_a
                ),
                ""
                if rec.incidence_residuals is None
                else float(np.max(rec.incidence_residuals)),
            ]
        )
    return {
        "command": "critical",
        "tolerances": dict(_base_tolerances(chain), grad_tol_rel=args.tol),
        "inputs": {
            "file": args.file,
            "starts": args.starts if args.starts else "auto",
            "seed": args.seed,
            "grid": args.grid if args.grid else "",
        },
        "results": {
            "isolated_count": len(census.isolated),
            "zero_fiber_count": len(census.zero_fiber),
            "counts_by_index": [int(c) for c in census.counts_by_index],
            "eulerian_bound": census.bound,
            "euler_alternating_sum": crit.euler_alt_sum(census),
        },
        "tables": {
            "census": {
                "columns": [
                    "theta",
                    "value",
                    "grad_norm",
                    "index",
                    "class",
                    "params_a",
                    "max_residual",
                ],
                "rows": rows,
            }
        },
    }


def cmd_critical(args):
    panel, chain = _load(args.file)
    config = crit.SearchConfig(
        starts=args.starts, seed=args.seed, tol=args.tol, grid=args.grid
    )
    census = crit.find_critical(chain, config)
    print(render(_census_report(chain, census, args), args.format), end="")
    return EXIT_OK


def cmd_classify(args):
    panel, chain = _load(args.file)
    theta = normalize_theta(chain, _parse_theta(args.theta, chain.n))
    f = squared_distance(chain, theta)
    g = gradient(chain, theta)
    grad_norm = float(np.linalg.norm(g))
    critical = np.max(np.abs(g)) <= CRITICAL_GRAD_REL_TOL * chain.scale**2
    results = {
        "value": f,
        "distance": float(np.sqrt(max(f, 0.0))),
        "grad_norm": grad_norm,
        "critical": bool(critical),
    }
    if f <= ZERO_VALUE_REL_TOL * chain.scale**2:
        results["class"] = "zero_fiber" if critical else "near_zero"
    else:
        try:
            residuals = crit.incidence_residuals(chain, theta)
            results["max_residual"] = float(np.max(residuals))
        except ZeroValue:
            residuals = None
        try:
            params = crit.intersection_params(chain, theta)
            results["params_a"] = _params_cells(params, chain.n)
        except (NotIncident, ZeroValue):
            params = None
        if critical:
            eig = np.linalg.eigvalsh(hessian_numeric(chain, theta))
            eig_tol = 1e-7 * max(float(np.max(np.abs(eig))), 1e-300)
            index = int(np.sum(eig < -eig_tol))
            results["index"] = index
            results["eigenvalues"] = [float(v) for v in eig]
            if params is not None and crit.max_ordered(params):
                results["class"] = "global_max_certified"
            elif params is not None and crit.min_ordered(params):
                results["class"] = "min_candidate"
            else:
                results["class"] = "saddle"
        else:
            results["class"] = "not_critical"
    report = {
        "command": "classify",
        "tolerances": _base_tolerances(chain),
        "inputs": {"file": args.file, "theta": [float(v) for v in theta]},
        "results": results,
    }
    print(render(report, args.format), end="")
    return EXIT_OK


def cmd_panel(args):
    panel, chain = _load(args.file)
    if panel is None:
        raise HingeChainError("file has no panel normals; not a panel chain")
    if args.flatten:
        panel = panel_mod.flatten_reference(panel)
        chain = panel.chain
    results = {}
    tables = {}
    if args.panel_op == "flat":
        configs = panel_mod.flat_configurations(panel)
        rows = []
        for idx, theta in enumerate(configs):
            g = gradient(chain, theta)
            rows.append(
                [idx, " ".join(repr(float(v)) for v in theta)]
                + [squared_distance(chain, theta), float(np.linalg.norm(g))]
            )
        results["count"] = len(configs)
        tables["flat_configurations"] = {
            "columns": ["id", "theta", "value", "grad_norm"],
            "rows": rows,
        }
    elif args.panel_op == "orbit":
        theta = normalize_theta(chain, _parse_theta(args.theta, chain.n))
        members = panel_mod.orbit(panel, theta)
        results["cardinality"] = len(members)
        tables["orbit"] = {
            "columns": ["id", "theta", "value"],
            "rows": [
                [i, " ".join(repr(float(v)) for v in m), squared_distance(chain, m)]
                for i, m in enumerate(members)
            ],
        }
    elif args.panel_op == "involution":
        theta = normalize_theta(chain, _parse_theta(args.theta, chain.n))
        image = panel_mod.involution(panel, theta, args.anchor, args.k)
        results["theta"] = [float(v) for v in image]
        results["value"] = squared_distance(chain, image)
    else:
        raise HingeChainError(f"unknown panel operation '{args.panel_op}'")
    report = {
        "command": f"panel {args.panel_op}",
        "tolerances": _base_tolerances(chain),
        "inputs": {"file": args.file},
        "results": results,
        "tables": tables,
    }
    print(render(report, args.format), end="")
    return EXIT_OK


def cmd_bound(args):
    bound = crit.eulerian_bound(args.n, args.d)
    report = {
        "command": "bound",
        "tolerances": {},
        "inputs": {"n": args.n, "d": args.d},
        "results": {
            "bound": bound,
            "eulerian_row": crit.eulerian_numbers(args.n),
        },
    }
    print(render(report, args.format), end="")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hingechain",
        description="Reach analysis and critical-configuration census for "
        "serial body-and-hinge chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_file=True):
        if needs_file:
            p.add_argument("file", help="hingechain/1 chain description")
        p.add_argument(
            "--format",
            choices=("table", "structured"),
            default="table",
            help="report format (default: table)",
        )

    p_fk = sub.add_parser("fk", help="forward kinematics at a configuration")
    add_common(p_fk)
    p_fk.add_argument("--theta", required=True, help="comma-separated angles")
    p_fk.set_defaults(func=cmd_fk)

    p_reach = sub.add_parser("reach", help="certified global maximum reach")
    add_common(p_reach)
    p_reach.add_argument("--tol", type=float, default=None, help="sweep tolerance")
    p_reach.add_argument("--max-sweeps", type=int, default=reach_mod.MAX_SWEEPS)
    p_reach.set_defaults(func=cmd_reach)

    p_crit = sub.add_parser("critical", help="multistart critical-point census")
    add_common(p_crit)
    p_crit.add_argument("--starts", type=int, default=None)
    p_crit.add_argument("--seed", type=int, default=0)
    p_crit.add_argument("--tol", type=float, default=1e-9)
    p_crit.add_argument(
        "--grid", type=int, default=None, help="use a full grid^n start lattice"
    )
    p_crit.set_defaults(func=cmd_critical)

    p_cls = sub.add_parser("classify", help="classify a single configuration")
    add_common(p_cls)
    p_cls.add_argument("--theta", required=True, help="comma-separated angles")
    p_cls.set_defaults(func=cmd_classify)

    p_panel = sub.add_parser("panel", help="panel-chain analyses")
    p_panel.add_argument("file", help="hingechain/1 chain description with panels")
    p_panel.add_argument("panel_op", choices=("flat", "orbit", "involution"))
    p_panel.add_argument("--theta", default=None, help="comma-separated angles")
    p_panel.add_argument("--anchor", choices=("head", "tail"), default="head")
    p_panel.add_argument("--k", type=int, default=0, help="hinge index (0-based)")
    p_panel.add_argument(
        "--flatten",
        action="store_true",
        help="rebase to a flat reference placement first",
    )
    p_panel.add_argument(
        "--format", choices=("table", "structured"), default="table"
    )
    p_panel.set_defaults(func=cmd_panel)

    p_bound = sub.add_parser("bound", help="Eulerian critical-point bound")
    p_bound.add_argument("n", type=int)
    p_bound.add_argument("d", type=int)
    p_bound.add_argument(
        "--format", choices=("table", "structured"), default="table"
    )
    p_bound.set_defaults(func=cmd_bound)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (HingeChainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
