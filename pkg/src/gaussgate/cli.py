"""Command-line interface.

    gaussgate figure --id N --out DIR     reproduce one figure as CSV + SVG
    gaussgate metric NAME k=v [k=v ...]   evaluate one exposed metric
    gaussgate check --level fast|full     run the invariant suite
    gaussgate sdp --choi FILE --energy E  solve an imported Choi-difference SDP

All numbers are printed with 12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import GaussgateError, UnknownQuery
from . import checks
from . import ecd_sdp as es
from . import figures
from . import fock_oracle as fo
from . import metrics_bounds as mb


def _fmt(x) -> str:
    return "%.12g" % float(x)


def _sum_sine_note(params):
    fid = mb.sum_tms_fidelity(
        params["N"], params.get("R", mb.R_UNIT_GAIN),
        params.get("rA", mb.R_15_DB), params["rB"],
    )
    sine = np.sqrt(1.0 - fid)
    return f"fidelity={_fmt(fid)} accuracy={_fmt(1.0 - sine)}"


def _squeezer_sine_note(params):
    fid = mb.squeezer_tms_fidelity(params["r"], params["r_E"], params["N"])
    sine = np.sqrt(1.0 - fid)
    return f"fidelity={_fmt(fid)} accuracy={_fmt(1.0 - sine)}"


def _d1_any_energy(eta, E, M=14):
    """Closed form for 0 < E < 1, Fock trace distance otherwise."""
    if 0.0 < E < 1.0:
        return mb.d1(eta, E), "closed_form"
    return mb.displacement_trace_distance_oracle(eta, E, int(M)), "fock_trace"


# name -> (callable(**params) -> value or (value, method), params, kind, method, note)
METRICS = {
    "f_sine": (mb.f_sine, ("eta", "E"), "upper", "closed_form", None),
    "d1": (lambda eta, E, M=14: _d1_any_energy(eta, E, M),
           ("eta", "E", "M?"), "lower", None, None),
    "d2": (lambda eta, E, M=6: es.d2_displacement(eta, E, int(M)),
           ("eta", "E", "M?"), "lower", "sdp", None),
    "varrho_trace_norm": (lambda eta, E: mb.varrho_matrix(eta, E)[1],
                          ("eta", "E"), "value", "closed_form", None),
    "tensor_disp_bound": (
        lambda etas, E: mb.tensor_disp_bound(
            [float(x) for x in str(etas).split(";")], E
        ),
        ("etas", "E"), "upper", "closed_form", None),
    "g_angle_bound": (mb.g_angle_bound, ("loc", "scale", "E"),
                      "upper", "quadrature", None),
    "trunc_normal_pdf": (mb.trunc_normal_pdf, ("x", "loc", "scale", "lo", "hi"),
                         "value", "closed_form", None),
    "squeezer_sv_fidelity": (mb.squeezer_sv_fidelity, ("r", "r_E", "z"),
                             "value", "closed_form", None),
    "squeezer_tms_fidelity": (mb.squeezer_tms_fidelity, ("r", "r_E", "N"),
                              "value", "closed_form", None),
    "squeezer_tms_sine": (mb.squeezer_tms_sine, ("r", "r_E", "N"),
                          "value", "closed_form", _squeezer_sine_note),
    "sum_sv_fidelity": (mb.sum_sv_fidelity, ("z", "R", "rA", "rB"),
                        "value", "closed_form", None),
    "sum_tms_fidelity": (mb.sum_tms_fidelity, ("N", "R", "rA", "rB"),
                         "value", "closed_form", None),
    "sum_sine": (lambda rB, N, rA=mb.R_15_DB, R=mb.R_UNIT_GAIN:
                 mb.sum_sine(rB, N, rA, R),
                 ("rB", "N", "rA?", "R?"), "value", "closed_form", _sum_sine_note),
    "db_to_r": (mb.db_to_r, ("db",), "value", "closed_form", None),
    "r_to_db": (mb.r_to_db, ("r",), "value", "closed_form", None),
}


def evaluate_metric(name: str, params: dict):
    """Resolve a metric query; returns (value, kind, method, note string)."""
    if name not in METRICS:
        raise UnknownQuery(
            f"unknown metric {name!r}; available: {', '.join(sorted(METRICS))}"
        )
    func, sig, kind, method, note_fn = METRICS[name]
    required = {p.rstrip("?") for p in sig if not p.endswith("?")}
    allowed = {p.rstrip("?") for p in sig}
    missing = required - set(params)
    extra = set(params) - allowed
    if missing or extra:
        raise UnknownQuery(
            f"metric {name} takes {', '.join(sig)}; "
            f"missing {sorted(missing)}, unexpected {sorted(extra)}"
        )
    result = func(**params)
    if isinstance(result, tuple):
        value, method = result
    else:
        value = result
    note = note_fn(params) if note_fn else None
    return value, kind, method, note


def _parse_params(items):
    params = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep:
            raise UnknownQuery(f"expected key=value, got {item!r}")
        try:
            params[key] = float(val)
        except ValueError:
            params[key] = val
    return params


def cmd_metric(args) -> int:
    value, kind, method, note = evaluate_metric(args.name, _parse_params(args.params))
    line = _fmt(value)
    tags = []
    if kind in ("lower", "upper"):
        tags.append(f"{kind} bound")
    tags.append(f"method={method}")
    line += "  # " + ", ".join(tags)
    if note:
        line += "  [" + note + "]"
    print(line)
    return 0


def cmd_figure(args) -> int:
    for fig_id in args.ids:
        paths = figures.cmd_figure(fig_id, args.out)
        for p in paths:
            print(p)
    return 0


def cmd_check(args) -> int:
    ok, report = checks.run_checks(args.level)
    for row in report:
        print(f"[{row['status'].upper():4s}] {row['id']}: {row['property']}"
              f" -- {row['detail']}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"level": args.level, "ok": ok, "checks": report}, fh, indent=2)
            fh.write("\n")
    print(f"{'all checks passed' if ok else 'FAILURES detected'} "
          f"({len(report)} checks, level={args.level})")
    return 0 if ok else 1


def cmd_sdp(args) -> int:
    with open(args.choi, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if "J_re" in payload:
        problem = es.problem_from_json({**payload, "E": args.energy})
    else:
        J, dim = fo.choi_from_json(payload)
        problem = es.EcdProblem(J, dim, dim, args.energy)
    solution = es.solve_ecd(problem)
    out = solution.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(out, fh, indent=2)
            fh.write("\n")
    print(f"primal={_fmt(solution.primal)} dual_gap={_fmt(solution.dual_gap)} "
          f"iterations={solution.iterations}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussgate",
        description="Gaussian-gate approximation metrics and bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fig = sub.add_parser("figure", help="write figure CSV/SVG files")
    p_fig.add_argument("--id", dest="ids", type=int, action="append", required=True,
                       choices=figures.FIGURE_IDS, help="figure number (repeatable)")
    p_fig.add_argument("--out", required=True, help="output directory")
    p_fig.set_defaults(func=cmd_figure)

    p_met = sub.add_parser("metric", help="evaluate one metric")
    p_met.add_argument("name", help="metric name, e.g. f_sine")
    p_met.add_argument("params", nargs="*", help="key=value parameters")
    p_met.set_defaults(func=cmd_metric)

    p_chk = sub.add_parser("check", help="run the invariant suite")
    p_chk.add_argument("--level", choices=("fast", "full"), default="fast")
    p_chk.add_argument("--json", help="also write a JSON report to this path")
    p_chk.set_defaults(func=cmd_check)

    p_sdp = sub.add_parser("sdp", help="solve an imported Choi-difference SDP")
    p_sdp.add_argument("--choi", required=True, help="JSON file with the Choi difference")
    p_sdp.add_argument("--energy", type=float, required=True, help="energy bound E")
    p_sdp.add_argument("--out", help="write the solution JSON here")
    p_sdp.set_defaults(func=cmd_sdp)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GaussgateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
