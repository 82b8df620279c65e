"""Command-line front end.

Exit status: 0 when everything checked passes, 1 when a relation check fails
(or an expected entanglement verdict is not reached), 2 on invalid input.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import formats
from .bases import design_identity_residual, gell_mann_basis, random_rotated_basis
from .entropy import h2_classical_conditional, h2_conditional, pg_entanglement_fidelity
from .linalg import ValidationError
from .measurements import (
    MumSet,
    build_mum_set,
    build_sim_set,
    conical_design_fit,
    f_kappa,
    g_kappa,
    l_eta,
    mub_set,
    r_eta,
    t_from_kappa,
    verify_mum,
    verify_sim,
)
from .optimizer import OptimizerConfig, optimize_bob
from .relations import (
    RelationReport,
    detect_state,
    lemma1_check,
    lemma2_check,
    theorem1_check,
    theorem2_check,
)
from .selftest import run_selftest
from .states import random_state


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int
    tool_version: str = __version__
    reports: list[RelationReport] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        # witness reports carry a verdict; a violation there is a finding, not a failed check
        return all(r.passed for r in self.reports if not _is_witness(r))

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "toolVersion": self.tool_version,
            "reports": [r.to_dict() for r in self.reports],
            "data": self.data,
            "pass": self.passed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RunManifest":
        return cls(obj["command"], dict(obj["parameters"]), int(obj["seed"]), obj.get("toolVersion", ""),
                   [RelationReport.from_dict(r) for r in obj.get("reports", [])], dict(obj.get("data", {})))


_WITNESSES = ("lemma3", "lemma3_optimized", "sim_witness")


def _is_witness(r: RelationReport) -> bool:
    return r.name in _WITNESSES


def _fmt(x) -> str:
    return f"{x: .10f}" if isinstance(x, float) else str(x)


def render(manifest: RunManifest, fmt: str = "table") -> str:
    """Serialize a manifest as byte-stable JSON or a human-readable table."""
    if fmt == "json":
        return formats.dumps(manifest.to_dict())
    lines = [f"# {manifest.command}  (seed {manifest.seed}, conical-lab {manifest.tool_version})"]
    for key, val in manifest.data.items():
        if not isinstance(val, (dict, list)):
            lines.append(f"{key}: {_fmt(val)}")
    if manifest.reports:
        lines.append(f"{'name':<20} {'kind':<10} {'lhs':>16} {'rhs':>16} {'gap':>12}  pass")
        for r in manifest.reports:
            mark = "-" if _is_witness(r) else ("yes" if r.passed else "NO")
            lines.append(f"{r.name:<20} {r.kind:<10} {r.lhs:>16.10f} {r.rhs:>16.10f} {r.gap:>12.3e}  {mark}")
            if _is_witness(r):
                lines.append(f"  threshold {r.rhs:.10f}  verdict {r.context['verdict']}")
    else:
        lines.append("(no reports)")
    lines.append(f"overall: {'PASS' if manifest.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


# argument helpers

def _basis(args):
    if getattr(args, "basis", None):
        return formats.basis_from_json(formats.load(args.basis))
    if args.seed is not None and getattr(args, "random_basis", False):
        return random_rotated_basis(args.dim, args.seed)
    return gell_mann_basis(args.dim)


def _t_value(args, d):
    if getattr(args, "kappa", None) is not None:
        return t_from_kappa(d, args.kappa)
    if args.t in (None, "max"):
        return "max"
    return float(args.t)


def _state(args):
    if args.state:
        return formats.state_from_json(formats.load(args.state))
    if args.dim is None:
        raise ValidationError("give --state or --dim to draw a random state")
    return random_state(args.dim, args.dim_b or args.dim, rank=args.rank, seed=args.seed)


def _mums(args, d):
    if args.mum:
        return formats.mum_from_json(formats.load(args.mum))
    if getattr(args, "mub", False):
        return mub_set(d)
    return build_mum_set(_basis_for(args, d), _t_value(args, d))


def _basis_for(args, d):
    if getattr(args, "basis", None):
        return formats.basis_from_json(formats.load(args.basis))
    return gell_mann_basis(d)


def _write(args, obj):
    if args.out:
        formats.save(obj, args.out)


# subcommands

def cmd_basis_gen(args, m: RunManifest):
    basis = random_rotated_basis(args.dim, args.seed) if args.seed is not None else gell_mann_basis(args.dim)
    _write(args, formats.basis_to_json(basis))
    m.data.update(dim=basis.dim, count=len(basis), residual=design_identity_residual(basis))


def cmd_basis_check(args, m: RunManifest):
    basis = formats.basis_from_json(formats.load(args.input))
    res = design_identity_residual(basis)
    m.reports.append(RelationReport("swap_identity", res, 0.0, "equality", args.tol or 1e-9, {"d": basis.dim}))


def cmd_mum_build(args, m: RunManifest):
    basis = _basis(args)
    mums = build_mum_set(basis, _t_value(args, basis.dim))
    _write(args, formats.mum_to_json(mums))
    m.data.update(dim=mums.dim, t=mums.t, kappa=mums.kappa, f=mums.f, g=mums.g)


def _check_report(name, rep, context) -> RelationReport:
    worst, dev = rep.worst
    return RelationReport(name, dev, 0.0, "equality", rep.tol, dict(context, worst=worst, **rep.deviations))


def cmd_mum_verify(args, m: RunManifest):
    mums = formats.mum_from_json(formats.load(args.input))
    rep = verify_mum(mums, args.tol or 1e-9)
    m.reports.append(_check_report("mum_conditions", rep, {"d": mums.dim, "kappa": mums.kappa}))


def cmd_sim_build(args, m: RunManifest):
    basis = _basis(args)
    d = basis.dim
    if args.eta is not None:
        if not (1 / d**3 < args.eta <= 1 / d**2):
            raise ValidationError(f"eta must lie in (1/{d**3}, 1/{d**2}]")
        t = float(np.sqrt((args.eta - 1 / d**3) / ((d + 1) ** 2 * (d * d - 1))))
    else:
        t = "max" if args.t in (None, "max") else float(args.t)
    sim = build_sim_set(basis, t)
    _write(args, formats.sim_to_json(sim))
    m.data.update(dim=sim.dim, t=sim.t, eta=sim.eta, l=sim.l, r=sim.r)


def cmd_sim_verify(args, m: RunManifest):
    sim = formats.sim_from_json(formats.load(args.input))
    rep = verify_sim(sim, args.tol or 1e-9)
    m.reports.append(_check_report("sim_conditions", rep, {"d": sim.dim, "eta": sim.eta}))


def cmd_design_fit(args, m: RunManifest):
    obj = formats.load(args.input)
    tol = args.tol or 1e-9
    if "povms" in obj:
        mums = formats.mum_from_json(obj)
        fit = conical_design_fit(mums.elements())
        kp, km = f_kappa(mums.dim, mums.kappa), g_kappa(mums.dim, mums.kappa)
    else:
        sim = formats.sim_from_json(obj)
        fit = conical_design_fit(sim.operators)
        kp, km = l_eta(sim.dim, sim.eta), r_eta(sim.dim, sim.eta)
    m.data.update(k_plus=fit.k_plus, k_minus=fit.k_minus, residual=fit.residual)
    m.reports.append(RelationReport("design_k_plus", fit.k_plus, kp, "equality", tol))
    m.reports.append(RelationReport("design_k_minus", fit.k_minus, km, "equality", tol))
    m.reports.append(RelationReport("design_residual", fit.residual, 0.0, "equality", tol))


def cmd_mub_gen(args, m: RunManifest):
    mums = mub_set(args.dim)
    _write(args, formats.mum_to_json(mums))
    m.reports.append(_check_report("mum_conditions", verify_mum(mums), {"d": mums.dim, "kappa": 1.0}))


def cmd_entropy_h2(args, m: RunManifest):
    state = _state(args)
    h2 = h2_conditional(state)
    m.data.update(dA=state.dA, dB=state.dB, h2_AB=h2, F_pg=pg_entanglement_fidelity(state))


def cmd_entropy_classical(args, m: RunManifest):
    p = formats.distribution_from_json(formats.load(args.input))
    m.data.update(h2_XY=h2_classical_conditional(p))


_RELATIONS = {"theorem1": theorem1_check, "lemma1": lemma1_check, "lemma2": lemma2_check}


def cmd_relation(args, m: RunManifest):
    state = _state(args)
    tol = args.tol
    if args.which == "theorem2":
        if args.sim:
            sim = formats.sim_from_json(formats.load(args.sim))
        else:
            sim = build_sim_set(_basis_for(args, state.dA), "max" if args.t in (None, "max") else float(args.t))
        report = theorem2_check(state, sim, tol) if tol else theorem2_check(state, sim)
    else:
        mums = _mums(args, state.dA)
        fn = _RELATIONS[args.which]
        report = fn(state, mums, tol) if tol else fn(state, mums)
    m.reports.append(report)


def cmd_detect(args, m: RunManifest):
    state = _state(args)
    mums: MumSet = _mums(args, state.dA)
    tol = args.tol or 1e-9
    if args.optimize:
        cfg = OptimizerConfig(restarts=args.restarts, max_iters=args.iters, seed=args.seed or 0)
        strategy, report = optimize_bob(state, mums, cfg, tol)
        if args.out:
            formats.save(formats.strategy_to_json(strategy), args.out)
    else:
        if state.dB != state.dA:
            raise ValidationError("default Bob measurements need dB == dA; use --optimize")
        report = detect_state(state, mums, tol=tol)
    m.reports.append(report)
    m.data.update(threshold=report.rhs, verdict=report.context["verdict"])
    if args.expect_entangled and report.context["verdict"] != "entangled":
        m.data["expectation"] = "entangled verdict expected but not reached"


def cmd_selftest(args, m: RunManifest):
    dims = tuple(int(x) for x in args.dims.split(","))
    reports, summary = run_selftest(dims, args.trials, args.seed or 0)
    m.reports.extend(reports)
    m.data["suites"] = summary


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--out", default=None)

    state_opts = argparse.ArgumentParser(add_help=False)
    state_opts.add_argument("--state", help="state JSON file")
    state_opts.add_argument("--dim", type=int, help="dimension of A (random state when --state is absent)")
    state_opts.add_argument("--dim-b", type=int, default=None)
    state_opts.add_argument("--rank", type=int, default=None)

    meas_opts = argparse.ArgumentParser(add_help=False)
    meas_opts.add_argument("--mum", help="MUM JSON file")
    meas_opts.add_argument("--basis", help="basis JSON file")
    meas_opts.add_argument("--mub", action="store_true", help="use the exact MUB set (d = 2, 3, 5)")
    meas_opts.add_argument("--t", default=None)
    meas_opts.add_argument("--kappa", type=float, default=None)

    parser = argparse.ArgumentParser(prog="conical-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    groups = parser.add_subparsers(dest="group", required=True)

    basis = groups.add_parser("basis").add_subparsers(dest="action", required=True)
    p = basis.add_parser("gen", parents=[common])
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_basis_gen)
    p = basis.add_parser("check", parents=[common])
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_basis_check)

    mum = groups.add_parser("mum").add_subparsers(dest="action", required=True)
    p = mum.add_parser("build", parents=[common])
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t", default="max")
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--basis", default=None)
    p.add_argument("--random-basis", action="store_true")
    p.set_defaults(func=cmd_mum_build)
    p = mum.add_parser("verify", parents=[common])
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_mum_verify)

    sim = groups.add_parser("sim").add_subparsers(dest="action", required=True)
    p = sim.add_parser("build", parents=[common])
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t", default="max")
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--basis", default=None)
    p.add_argument("--random-basis", action="store_true")
    p.set_defaults(func=cmd_sim_build)
    p = sim.add_parser("verify", parents=[common])
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_sim_verify)

    design = groups.add_parser("design").add_subparsers(dest="action", required=True)
    p = design.add_parser("fit", parents=[common])
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_design_fit)

    mub = groups.add_parser("mub").add_subparsers(dest="action", required=True)
    p = mub.add_parser("gen", parents=[common])
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_mub_gen)

    ent = groups.add_parser("entropy").add_subparsers(dest="action", required=True)
    p = ent.add_parser("h2", parents=[common, state_opts])
    p.set_defaults(func=cmd_entropy_h2)
    p = ent.add_parser("classical", parents=[common])
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_entropy_classical)

    rel = groups.add_parser("relation").add_subparsers(dest="which", required=True)
    for name in ("theorem1", "lemma1", "lemma2", "theorem2"):
        p = rel.add_parser(name, parents=[common, state_opts, meas_opts])
        p.add_argument("--sim", help="SIM JSON file (theorem2)")
        p.set_defaults(func=cmd_relation)

    p = groups.add_parser("detect", parents=[common, state_opts, meas_opts])
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--expect-entangled", action="store_true")
    p.set_defaults(func=cmd_detect)

    p = groups.add_parser("selftest", parents=[common])
    p.add_argument("--dims", default="2,3")
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=cmd_selftest)

    p = groups.add_parser("replay", parents=[common])
    p.add_argument("--in", dest="input", required=True, help="manifest JSON written with --json")
    p.set_defaults(func=None)
    return parser


def execute(argv: list[str]) -> tuple[int, str]:
    """Run one command; returns ``(exit code, rendered output)``."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.group == "replay":
        try:
            manifest = RunManifest.from_dict(formats.load(args.input))
        except (KeyError, TypeError, ValueError) as exc:
            return 2, f"error: bad manifest: {exc}\n"
        argv = list(manifest.parameters["argv"])
        if args.json and "--json" not in argv:
            argv.append("--json")
        return execute(argv)
    command = " ".join(filter(None, [args.group, getattr(args, "action", None) or getattr(args, "which", None)]))
    manifest = RunManifest(command, {"argv": list(argv)}, args.seed if args.seed is not None else 0)
    try:
        args.func(args, manifest)
    except ValidationError as exc:
        return 2, f"error: {exc}\n"
    code = 0 if manifest.passed and "expectation" not in manifest.data else 1
    return code, render(manifest, "json" if args.json else "table")


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        code, out = execute(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    stream = sys.stderr if code == 2 else sys.stdout
    stream.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
