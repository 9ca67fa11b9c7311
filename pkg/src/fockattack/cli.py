"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .attack import (
    AttackPoint,
    Branch,
    Mode,
    attack_information,
    classify_region,
    critical_mu,
    iso_info_boundary,
    solve_split,
    top_boundary,
    bottom_boundary,
    verify_rate_condition,
)
from .fock import DEFAULT_TAIL_TOL
from .infocalc import holevo_full
from .projection import reduced_overlap
from .protocols import (
    Basis,
    MZIParams,
    PhaseMatchingParams,
    PhaseTimeParams,
    SCWParams,
    mzi_to_canonical,
    pm_block_probability,
    pm_reduced_overlap,
    pm_to_canonical,
    pt_overlap_check,
    pt_to_canonical,
    scw_information,
    scw_power_budget_ok,
    scw_sideband_power,
)
from .selfcheck import DEFAULT_TOL, run_all

SCHEMA_VERSION = "1.0"
CSV_HEADER = ["mu", "eta_L", "delta", "I", "chi", "region", "z", "eta1"]
BOUNDARY_HEADER = ["mu", "top_eta", "bottom_eta", "iso_eta"]
MODE_FLAGS = {"approx": Mode.PAPER_APPROX, "exact": Mode.EXACT_POISSON}
EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3

_PI_RE = re.compile(r"^\s*([-+]?[0-9.]*(?:[eE][-+]?\d+)?)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$")


class InputError(ValueError):
    pass


def angle(text: str) -> float:
    """Parse a float or a multiple of pi such as ``pi/2``, ``0.0237pi``, ``3*pi/8``."""
    s = text.strip().replace("π", "pi")
    m = _PI_RE.match(s)
    if m:
        coef = m.group(1)
        value = (float(coef) if coef not in ("", "+", "-") else (-1.0 if coef == "-" else 1.0)) * math.pi
        return value / float(m.group(2)) if m.group(2) else value
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def fmt(x) -> str:
    return format(float(x), ".12g")


def num(x) -> float:
    """Round to the 12 significant digits used in every emitted document."""
    return float(fmt(x))


def read_config(path: str) -> dict:
    """key=value lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def settings(args) -> dict:
    cfg = {"mode": "approx", "branch": "plus", "tail_tol": str(DEFAULT_TAIL_TOL), "json": "false"}
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    for key in ("mode", "branch", "tail_tol", "json"):
        if hasattr(args, key):
            cfg[key] = str(getattr(args, key))
    try:
        mode = MODE_FLAGS[cfg["mode"]] if cfg["mode"] in MODE_FLAGS else Mode(cfg["mode"])
        branch = Branch(cfg["branch"])
        tail_tol = float(cfg["tail_tol"])
    except (KeyError, ValueError) as exc:
        raise InputError(f"bad setting: {exc}") from None
    if tail_tol <= 0:
        raise InputError("tail tolerance must be > 0")
    return {"mode": mode, "branch": branch, "tail_tol": tail_tol,
            "json": cfg["json"].lower() in ("1", "true", "yes", "on")}


def provenance(cfg: dict) -> dict:
    return {"version": __version__, "mode": cfg["mode"].value, "branch": cfg["branch"].value,
            "tail_tol": cfg["tail_tol"]}


def point_outputs(mu: float, delta: float, eta_L: float, cfg: dict) -> dict:
    point = AttackPoint(mu, delta, eta_L)
    if mu <= 0:
        raise InputError("mu must be > 0")
    plan = solve_split(mu, eta_L, cfg["mode"], cfg["branch"])
    report = classify_region(point, cfg["mode"], cfg["tail_tol"])
    info_I = attack_information(point, plan, cfg["tail_tol"])
    return {
        "I": num(info_I),
        "chi": num(report.chi),
        "region": report.region.value,
        "top_boundary_eta": num(report.top_boundary_eta),
        "bottom_boundary_eta": num(report.bottom_boundary_eta),
        "plan": {"eta1": num(plan.eta1), "eta2": num(plan.eta2), "z": num(plan.z),
                 "branch": plan.branch.value, "mode": plan.mode.value},
        "rate_residual": num(verify_rate_condition(plan, mu, eta_L)),
    }


def document(command: str, inputs: dict, outputs: dict, cfg: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command,
            "inputs": {k: (num(v) if isinstance(v, float) else v) for k, v in inputs.items()},
            "outputs": outputs, "provenance": provenance(cfg)}


def _human(obj, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}{k}:")
                lines.extend(_human(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}- [{i}]")
                lines.extend(_human(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    return lines


def _scalar(v) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def emit(doc: dict, cfg: dict, out=None):
    out = out or sys.stdout
    if cfg["json"]:
        out.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    else:
        out.write("\n".join(_human({"command": doc["command"], **doc["outputs"]})) + "\n")


# commands


def cmd_info(args, cfg):
    outputs = point_outputs(args.mu, args.delta, args.eta_l, cfg)
    return document("info", {"mu": args.mu, "delta": args.delta, "eta_L": args.eta_l}, outputs, cfg)


def axis(lo: float, hi: float, steps: int, scale: str) -> np.ndarray:
    if not lo < hi or steps < 2:
        raise InputError(f"axis needs min < max and steps >= 2, got [{lo}, {hi}] x {steps}")
    if scale == "log":
        if lo <= 0:
            raise InputError("log axis needs a positive minimum")
        return np.geomspace(lo, hi, steps)
    return np.linspace(lo, hi, steps)


def sweep_rows(mu_axis, eta_axis, delta: float, cfg: dict) -> list[list[str]]:
    rows = []
    for mu in mu_axis:
        for eta in eta_axis:
            rep = classify_region(AttackPoint(float(mu), delta, float(eta)), cfg["mode"], cfg["tail_tol"])
            rows.append([fmt(mu), fmt(eta), fmt(delta), fmt(rep.info_I), fmt(rep.chi), rep.region.value,
                         fmt(rep.plan.z), fmt(rep.plan.eta1)])
    return rows


def write_csv(path: str, header: list[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    data = buf.getvalue().encode("utf-8")
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)


def cmd_sweep(args, cfg):
    mu_axis = axis(args.mu_min, args.mu_max, args.mu_steps, args.mu_scale)
    eta_axis = axis(args.eta_min, args.eta_max, args.eta_steps, args.eta_scale)
    if args.mu_min <= 0:
        raise InputError("mu must be > 0")
    rows = sweep_rows(mu_axis, eta_axis, args.delta, cfg)
    write_csv(args.out, CSV_HEADER, rows)
    counts = {r: sum(1 for row in rows if row[5] == r) for r in ("bottom", "middle", "top")}
    return document("sweep", {"mu_min": args.mu_min, "mu_max": args.mu_max, "mu_steps": args.mu_steps,
                              "eta_min": args.eta_min, "eta_max": args.eta_max, "eta_steps": args.eta_steps,
                              "delta": args.delta, "mu_scale": args.mu_scale, "eta_scale": args.eta_scale},
                    {"out": args.out, "rows": len(rows), "region_counts": counts}, cfg)


def boundary_rows(delta: float, mu_axis, cfg: dict) -> list[list[str]]:
    rows = []
    for mu in mu_axis:
        mu = float(mu)
        iso = iso_info_boundary(delta, mu, eta_min=0.0, mode=cfg["mode"], tail_tol=cfg["tail_tol"])
        rows.append([fmt(mu), fmt(top_boundary(mu, delta)), fmt(bottom_boundary(mu)),
                     "" if iso is None else fmt(iso)])
    return rows


def cmd_boundary(args, cfg):
    if args.mu_min <= 0:
        raise InputError("mu must be > 0")
    mu_axis = axis(args.mu_min, args.mu_max, args.mu_steps, args.mu_scale)
    rows = boundary_rows(args.delta, mu_axis, cfg)
    write_csv(args.out, BOUNDARY_HEADER, rows)
    crossing = [float(r[0]) for r in rows if r[3]]
    return document("boundary", {"delta": args.delta, "mu_min": args.mu_min, "mu_max": args.mu_max,
                                 "mu_steps": args.mu_steps},
                    {"out": args.out, "rows": len(rows),
                     "iso_max_mu": num(max(crossing)) if crossing else None}, cfg)


def cmd_critical(args, cfg):
    res = critical_mu()
    return document("critical", {}, {"mu_star": num(res.mu_star), "delta_star": num(res.delta_star),
                                     "delta_star_over_pi": num(res.delta_star / math.pi),
                                     "analytic_bound": num(res.analytic_bound), "unimodal_scan": res.unimodal},
                    cfg)


def cmd_verify(args, cfg):
    suites = run_all(args.seed, args.samples, args.tol)
    ok = all(s.passed for s in suites)
    doc = document("verify", {"seed": args.seed, "samples": args.samples, "tol": args.tol},
                   {"passed": ok, "suites": [s.as_dict() for s in suites]}, cfg)
    doc["exit_code"] = EXIT_OK if ok else EXIT_VERIFY
    return doc


def _overlap_entry(n: int, got: complex, want: complex) -> dict:
    return {"n": n, "overlap_re": num(got.real), "overlap_im": num(got.imag),
            "expected_re": num(want.real), "expected_im": num(want.imag), "abs_error": num(abs(got - want))}


FAMILY_INPUTS = {
    "mzi": ("mod_alpha", "delta", "eta_l"),
    "phase-time": ("mod_alpha", "phi_i", "phi_j", "basis", "n_min", "n_max", "delta", "eta_l"),
    "phase-matching": ("mod_alpha", "theta", "phi", "theta_e", "n_min", "n_max", "eta_l"),
    "scw": ("mod_alpha0", "mu0", "m", "S", "beta_scale", "theta_e", "delta", "eta_l"),
}


def cmd_protocol(args, cfg):
    fam = args.family
    inputs = {k: getattr(args, k) for k in FAMILY_INPUTS[fam] if getattr(args, k) is not None}
    if fam == "mzi":
        pt = mzi_to_canonical(MZIParams(args.mod_alpha), args.eta_l, args.delta)
        return document("protocol", {"family": fam, **inputs}, point_outputs(pt.mu, pt.delta, pt.eta_L, cfg), cfg)
    if fam == "phase-time":
        basis = Basis(args.basis)
        p_i = PhaseTimeParams(args.mod_alpha, args.phi_i, basis)
        p_j = PhaseTimeParams(args.mod_alpha, args.phi_j, basis)
        checks = []
        for n in range(args.n_min, args.n_max + 1):
            checks.append(_overlap_entry(n, pt_overlap_check(p_i, p_j, n), reduced_overlap(args.phi_i, args.phi_j, n)))
        ok = all(c["abs_error"] <= DEFAULT_TOL for c in checks)
        pt = pt_to_canonical(p_i, args.eta_l, args.delta)
        out = {"overlap_check_passed": ok, "overlaps": checks, "point": {"mu": num(pt.mu), "delta": num(pt.delta),
               "eta_L": num(pt.eta_L)}, **point_outputs(pt.mu, pt.delta, pt.eta_L, cfg)}
        return document("protocol", {"family": fam, **inputs}, out, cfg)
    if fam == "phase-matching":
        base = dict(mod_alpha=args.mod_alpha, theta_a=args.theta, phi_a=args.phi, theta_e=args.theta_e)
        p0, p1 = PhaseMatchingParams(**base, p_a=0), PhaseMatchingParams(**base, p_a=1)
        checks = []
        for n in range(args.n_min, args.n_max + 1):
            want = 1.0 + 0j if n == 0 else 0j
            formula = pm_reduced_overlap(p0, p1, n)
            oracle = pm_reduced_overlap(p0, p1, n, oracle=True)
            entry = _overlap_entry(n, oracle, want)
            entry["formula_abs_error"] = num(abs(formula - want))
            checks.append(entry)
        ok = all(max(c["abs_error"], c["formula_abs_error"]) <= DEFAULT_TOL for c in checks)
        pt = pm_to_canonical(p0, args.eta_l)
        outs = point_outputs(pt.mu, pt.delta, pt.eta_L, cfg)
        out = {"orthogonality_verified": ok, "overlaps": checks,
               "block_probability_two_senders": num(pm_block_probability(pt.mu, outs["plan"]["eta1"])),
               "block_probability_one_sender": num(math.exp(-2 * outs["plan"]["eta1"] * pt.mu)), **outs}
        return document("protocol", {"family": fam, **inputs}, out, cfg)
    # scw
    mod_alpha0 = args.mod_alpha0 if args.mod_alpha0 is not None else math.sqrt(args.mu0)
    p = SCWParams(mod_alpha0, args.m, args.S, theta_e=args.theta_e, beta_scale=args.beta_scale)
    if not scw_power_budget_ok(p.m):
        raise InputError(f"power budget violated: J0^2({p.m}) <= 1 - J0^2({p.m})")
    per_pair, total = scw_information(p, args.eta_l, args.delta, cfg["mode"])
    chi_total = holevo_full(scw_sideband_power(p), args.delta)
    table = [{"p": i, "mu": num(pt.mu), "I": num(v), "chi": num(holevo_full(pt.mu, args.delta))}
             for i, pt, v in per_pair]
    out = {"power_budget_ok": True, "sideband_power": num(scw_sideband_power(p)),
           "reference_power": num(p.mod_alpha0**2 - scw_sideband_power(p)),
           "chi_sidebands": num(chi_total), "I_sum_capped": num(total), "sidebands": table}
    return document("protocol", {"family": fam, **inputs}, out, cfg)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit a JSON report")
    common.add_argument("--config", default=argparse.SUPPRESS, help="key=value settings file")
    common.add_argument("--mode", choices=["approx", "exact"], default=argparse.SUPPRESS,
                        help="split solver: linearized (default) or exact Poisson")
    common.add_argument("--branch", choices=["plus", "minus"], default=argparse.SUPPRESS)
    common.add_argument("--tail-tol", type=float, default=argparse.SUPPRESS,
                        help="relative Poisson tail dropped from the information series")

    parser = argparse.ArgumentParser(prog="fockattack", parents=[common],
                                     description="Post-selective Fock-projection attack calculator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("info", parents=[common], help="I, chi and region at one point")
    s.add_argument("--mu", type=float, required=True)
    s.add_argument("--delta", type=angle, default=math.pi / 2)
    s.add_argument("--eta-l", type=float, required=True)
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("sweep", parents=[common], help="region map over a (mu, eta_L) grid as CSV")
    s.add_argument("--mu-min", type=float, default=1e-3)
    s.add_argument("--mu-max", type=float, default=1.0)
    s.add_argument("--mu-steps", type=int, default=100)
    s.add_argument("--eta-min", type=float, default=1e-3)
    s.add_argument("--eta-max", type=float, default=1.0)
    s.add_argument("--eta-steps", type=int, default=100)
    s.add_argument("--mu-scale", choices=["linear", "log"], default="linear")
    s.add_argument("--eta-scale", choices=["linear", "log"], default="linear")
    s.add_argument("--delta", type=angle, default=math.pi / 2)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("boundary", parents=[common], help="top, bottom and I = chi curves as CSV")
    s.add_argument("--delta", type=angle, default=math.pi / 2)
    s.add_argument("--mu-min", type=float, default=1e-3)
    s.add_argument("--mu-max", type=float, default=1.0)
    s.add_argument("--mu-steps", type=int, default=100)
    s.add_argument("--mu-scale", choices=["linear", "log"], default="linear")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_boundary)

    s = sub.add_parser("critical", parents=[common], help="critical mean photon number")
    s.set_defaults(func=cmd_critical)

    s = sub.add_parser("verify", parents=[common], help="run the oracle equivalence suites")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--tol", type=float, default=DEFAULT_TOL, help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("protocol", parents=[common], help="map a protocol family onto the attack")
    s.add_argument("family", choices=["mzi", "phase-time", "phase-matching", "scw"])
    s.add_argument("--mod-alpha", type=float, default=0.3)
    s.add_argument("--delta", type=angle, default=math.pi / 2)
    s.add_argument("--eta-l", type=float, default=0.02)
    s.add_argument("--phi-i", type=angle, default=0.0)
    s.add_argument("--phi-j", type=angle, default=math.pi)
    s.add_argument("--basis", choices=["L", "R"], default="L")
    s.add_argument("--theta", type=angle, default=0.0)
    s.add_argument("--phi", type=angle, default=0.0)
    s.add_argument("--theta-e", type=angle, default=0.0)
    s.add_argument("--n-min", type=int, default=0)
    s.add_argument("--n-max", type=int, default=6)
    s.add_argument("--mod-alpha0", type=float, default=None)
    s.add_argument("--mu0", type=float, default=0.5, help="carrier mean photon number |alpha0|^2")
    s.add_argument("--m", type=float, default=0.5, help="modulation index")
    s.add_argument("--S", type=int, default=40)
    s.add_argument("--beta-scale", type=float, default=None)
    s.set_defaults(func=cmd_protocol)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = settings(args)
        doc = args.func(args, cfg)
    except OSError as exc:
        print(f"fockattack: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError) as exc:
        print(f"fockattack: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code = doc.pop("exit_code", EXIT_OK)
    emit(doc, cfg, sys.stderr if getattr(args, "out", None) == "-" else None)
    return code


if __name__ == "__main__":
    sys.exit(main())
