"""``acx`` command line: config ingestion, dispatch, outputs and exit codes.

Exit codes: 0 success or passing verdict, 1 failing verdict or numerical
failure, 2 input or configuration error (one line on stderr).
"""
import argparse
import hashlib
import json
import os
import sys

import numpy as np

from ..core.levi import is_strictly_psh, levi_form
from ..core.regions import Ball
from ..core.structures import STANDARD, DeformationData, DeformationStructure, validate_structure
from ..disc.solver import SolverConfig, c1_c0_ratio, solve_disc
from ..errors import (AcxError, ConfigError, DegenerateBoundaryError, EllipticityError,
                      RegionError, ScenarioError)
from ..harness.experiments import NO_ACCUMULATION, PASS, compactness_verdict
from ..harness.manifest import RunManifest, canonical_json, jsonable, write_run
from ..harness.scenario import make_scenario
from ..kobayashi.distance import kr_distance
from ..kobayashi.metric import SearchConfig, kr_metric
from ..scaling.pipeline import convergence_report, scaling_sequence
from .config import Config, load_config, parse_region

COMMANDS = ("validate", "levi", "psh-check", "disc", "kobayashi", "scale", "wong-rosay",
            "compactness", "report")
INPUT_ERRORS = (ConfigError, RegionError, EllipticityError, ScenarioError, DegenerateBoundaryError,
                ValueError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="acx", description="Numerical workbench for almost complex structures on C^2.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", metavar="PATH", required=name != "report")
        s.add_argument("--out", metavar="DIR")
        s.add_argument("--resolution", type=int, metavar="N")
        s.add_argument("--nu-max", type=int, metavar="K", dest="nu_max")
        s.add_argument("--tol", type=float, metavar="X")
        s.add_argument("--seed", type=int, metavar="S")
        s.add_argument("--quiet", action="store_true")
    return p


class Context:
    """Resolved options: flag over config over default."""

    def __init__(self, args, cfg):
        self.args = args
        self.cfg = cfg or Config()
        self.quiet = args.quiet

    def opt(self, name, default=None):
        val = getattr(self.args, name, None)
        if val is not None:
            return val
        return self.cfg.get(name, default)

    def say(self, text):
        if not self.quiet:
            print(text)

    def structure_field(self, name):
        d = self.cfg.structure(name)
        return STANDARD if d is None else DeformationStructure(d)

    def out_dir(self, default=None):
        out = self.opt("out", default)
        if out is not None:
            os.makedirs(out, exist_ok=True)
        return out

    def snapshot(self):
        """Config plus effective overrides; paths are left out so reruns hash alike."""
        snap = self.cfg.to_dict()
        snap.pop("out", None)
        for k in ("resolution", "nu_max", "tol", "seed"):
            v = getattr(self.args, k, None)
            if v is not None:
                snap[k] = v
        return snap


def _check_flags(args):
    checks = {"resolution": (2, 512), "nu_max": (0, 30), "seed": (0, 2 ** 32 - 1)}
    for k, (lo, hi) in checks.items():
        v = getattr(args, k)
        if v is not None and not lo <= v <= hi:
            raise ConfigError(f"--{k.replace('_', '-')} = {v} out of range [{lo}, {hi}]")
    if args.tol is not None and not (0 < args.tol < 0.5):
        raise ConfigError(f"--tol = {args.tol} must lie in (0, 0.5)")


def _write_json(ctx, name, payload):
    out = ctx.out_dir()
    if out is None:
        return None
    path = os.path.join(out, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n")
    return path


def _region(sec, default=None):
    spec = sec.get("region")
    return parse_region(spec) if spec is not None else default


def cmd_validate(ctx):
    sec = ctx.cfg.section("validate")
    name = sec.get("structure", "J_st")
    J = ctx.structure_field(name)
    d = ctx.cfg.structure(name)
    region = _region(sec, _region(ctx.cfg.section("region"), d.region if d else Ball((0, 0), 1.0)))
    grid_n = ctx.opt("resolution", sec.get("grid_n", 9))
    rep = validate_structure(J, region, grid_n, eps=ctx.opt("tol", 1e-10))
    payload = {"structure": name, **rep.to_json()}
    _write_json(ctx, "validation.json", payload)
    ctx.say(f"validate {name}: max residual {rep.max_residual:.3e} on {rep.n_points} points "
            f"-> {'PASS' if rep.passed else 'FAIL'}")
    return 0 if rep.passed else 1


def cmd_levi(ctx):
    sec = ctx.cfg.section("levi")
    r = ctx.cfg.function(sec["function"]) if "function" in sec else None
    if r is None:
        raise ConfigError("[levi] needs a function")
    name = sec.get("structure", "J_st")
    J = ctx.structure_field(name)
    p = sec.get("point", np.zeros(2, complex))
    X = sec.get("vector", np.array([1, 0], complex))
    val = levi_form(r, J, p, X, method=sec.get("method", "auto"))
    fd = levi_form(r, J, p, X, method="fd")
    payload = {"function": sec["function"], "structure": name, "point": p, "vector": X,
               "levi": float(val), "levi_fd": float(fd)}
    _write_json(ctx, "levi.json", payload)
    ctx.say(f"levi form {val:.17g} (finite-difference check {fd:.17g})")
    return 0


def cmd_psh(ctx):
    sec = ctx.cfg.section("psh")
    if "function" not in sec:
        raise ConfigError("[psh] needs a function")
    r = ctx.cfg.function(sec["function"])
    name = sec.get("structure", "J_st")
    J = ctx.structure_field(name)
    d = ctx.cfg.structure(name)
    region = _region(sec, _region(ctx.cfg.section("region"), d.region if d else Ball((0, 0), 0.5)))
    grid_n = ctx.opt("resolution", sec.get("grid_n", 5))
    rep = is_strictly_psh(r, J, region, grid_n, tol=ctx.opt("tol", 1e-12))
    _write_json(ctx, "psh.json", {"function": sec["function"], "structure": name, **rep.to_json()})
    ctx.say(f"psh-check: min Levi eigenvalue {rep.min_eigenvalue:.6g} -> "
            f"{'strictly psh' if rep.verdict else 'not strictly psh'}")
    return 0 if rep.verdict else 1


def cmd_disc(ctx):
    sec = ctx.cfg.section("disc")
    name = sec.get("structure", "J_st")
    d = ctx.cfg.structure(name) or DeformationData()
    p = sec.get("p", np.zeros(2, complex))
    v = sec.get("v", np.array([0.5, 0], complex))
    N = ctx.opt("resolution", sec.get("N", 64))
    if N % 2 or N < 8:
        raise ConfigError(f"disc resolution must be even and >= 8, got {N}")
    cfg = SolverConfig(N=N, tol=ctx.opt("tol", 1e-10), max_iter=sec.get("max_iter", 200))
    f = solve_disc(d, p, v, cfg)
    ratio = c1_c0_ratio(f)
    payload = {"structure": name, "N": N, "p": p, "v": v, "residual": f.residual,
               "iterations": f.iterations, "c1_c0_ratio": ratio}
    out = ctx.out_dir()
    if out is not None:
        f.to_csv(os.path.join(out, "disc.csv"))
        _write_json(ctx, "disc.json", payload)
    ctx.say(f"disc: N={N} residual {f.residual:.3e} after {f.iterations} iterations, "
            f"C1/C0 ratio {ratio:.4g}")
    return 0


def cmd_kobayashi(ctx):
    sec = ctx.cfg.section("kobayashi")
    name = sec.get("structure", "J_st")
    d = ctx.cfg.structure(name)
    domain = parse_region(sec["domain"]) if "domain" in sec else Ball((0, 0), 1.0)
    p = sec.get("p", np.zeros(2, complex))
    v = sec.get("v", np.array([1, 0], complex))
    scfg = SearchConfig(seed_degree=sec.get("seed_degree", 8))
    est = kr_metric(domain, d, p, v, scfg)
    payload = {"structure": name, "p": p, "v": v, "upper": est.upper, "lower": est.lower,
               "status": est.diagnostics.get("status")}
    msg = f"kobayashi: K(p, v) <= {est.upper:.10g}"
    if "q" in sec:
        n = ctx.opt("resolution", sec.get("lattice_n", 16))
        dist = kr_distance(domain, d, p, sec["q"], lattice_n=n, cfg=scfg)
        payload.update(q=sec["q"], distance=dist, lattice_n=n)
        msg += f", d(p, q) <= {dist:.10g}"
    _write_json(ctx, "kobayashi.json", payload)
    ctx.say(msg)
    return 0 if est.ok else 1


def cmd_scale(ctx):
    sec = ctx.cfg.section("scale")
    if "function" not in sec:
        raise ConfigError("[scale] needs a function")
    r = ctx.cfg.function(sec["function"])
    base = sec.get("base", np.zeros(2, complex))
    rate = sec.get("rate", 4.0)
    eps = sec.get("perturbation", 0.0)
    name = sec.get("structure", "J_st")
    nu_max = ctx.opt("nu_max", 8)
    g = r.gradient(base)
    n = -(g[0::2] + 1j * g[1::2])
    n = n / np.linalg.norm(n)

    def J(nu):
        if eps:
            return DeformationStructure(DeformationData({(1, 0, 0, 0): eps / nu}))
        return None if name == "J_st" else ctx.structure_field(name)

    steps = scaling_sequence(r, lambda nu: base + rate ** -nu * n, J, nu_max)
    if len(steps) < 2:
        raise ConfigError("scale needs --nu-max >= 2")
    rep = convergence_report(steps, grid_n=sec.get("grid_n", 9))
    verdict = PASS if rep.passed else "FAIL"
    rows = [{"nu": s.nu, "tau": s.tau, "q_re1": s.q[0].real, "q_im1": s.q[0].imag,
             "q_re2": s.q[1].real, "q_im2": s.q[1].imag} for s in steps]
    out = ctx.out_dir("runs/scale")
    man = RunManifest(command="scale", scenario_hash=_hash(ctx.snapshot()), config=ctx.snapshot(),
                      per_nu=[{"nu": s.nu, "tau": s.tau} for s in steps], verdict=verdict,
                      details={"model": rep.model.to_json(), "domain_ok": rep.domain_ok,
                               "structure_ok": rep.structure_ok})
    write_run(out, man, rows, ("nu", "tau", "q_re1", "q_im1", "q_re2", "q_im2"), rep.rows,
              [verdict, f"domain_ok={rep.domain_ok}", f"structure_ok={rep.structure_ok}"])
    ctx.say(f"scale: {len(steps)} steps, final domain deviation "
            f"{rep.rows[-1]['domain_dev']:.3e} -> {verdict} ({out})")
    return 0 if rep.passed else 1


def _hash(obj):
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def _scenario(ctx):
    sec = ctx.cfg.section("scenario")
    kind = sec.pop("kind", "mobius")
    grid_n = sec.pop("grid_n", 7)
    nu_max = ctx.opt("nu_max")
    return make_scenario(kind, nu_max=nu_max, **sec), grid_n


def _run_scenario(ctx, command):
    s, grid_n = _scenario(ctx)
    grid_n = ctx.opt("resolution", grid_n)
    rep = compactness_verdict(s, grid_n=grid_n)
    out = ctx.out_dir(f"runs/{command}")
    extra = {}
    if rep.limit is not None:
        lim = rep.limit
        att_rows = rep.attraction[0].rows()
        conv_rows = lim.report.rows
        per_nu = lim.per_nu
        extra["rescaled.csv"] = (per_nu, ("nu", "tau", "normalization_err", "cauchy_diff"))
        details = {"limit": dict(lim.diagnostics)}
    else:
        att_rows = [{"candidate": i, **row} for i, t in enumerate(rep.attraction) for row in t.rows()]
        conv_rows = []
        per_nu = [{"nu": nu, "min_sup_dist": min(t.sup_dist[k] for t in rep.attraction)}
                  for k, nu in enumerate(s.nus)]
        extra["equicontinuity.csv"] = (rep.equicontinuity, ("nu", "delta", "omega"))
        details = {}
    details.update(message=rep.message, subsequence=rep.subsequence, nus=rep.nus,
                   candidate=rep.candidate)
    att_cols = ("nu", "sup_dist") if rep.limit is not None else ("candidate", "nu", "sup_dist")
    man = RunManifest(command=command, scenario_hash=s.digest(), config=ctx.snapshot(),
                      per_nu=per_nu, verdict=rep.verdict, details=details)
    write_run(out, man, att_rows, att_cols, conv_rows, [rep.verdict, rep.message], extra)
    ctx.say(f"{command}: scenario {s.name} -> {rep.verdict} ({rep.message}); run directory {out}")
    return rep.verdict


def cmd_wong_rosay(ctx):
    return 0 if _run_scenario(ctx, "wong-rosay") == PASS else 1


def cmd_compactness(ctx):
    return 0 if _run_scenario(ctx, "compactness") in (PASS, NO_ACCUMULATION) else 1


def cmd_report(ctx):
    out = ctx.opt("out")
    if out is None:
        raise ConfigError("report needs --out pointing at a run directory")
    path = os.path.join(out, "manifest.json")
    try:
        with open(path, encoding="utf-8") as fh:
            man = json.load(fh)
        with open(os.path.join(out, "verdict.txt"), encoding="utf-8") as fh:
            verdict = fh.readline().strip()
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read run directory {out!r}: {exc}") from None
    stored = man.pop("manifest_sha256", None)
    body = RunManifest(command=man.get("command"), scenario_hash=man.get("scenario_hash"),
                       config=man.get("config"), per_nu=man.get("per_nu"),
                       verdict=man.get("verdict"), files=man.get("files", []),
                       details=man.get("details", {}))
    intact = stored == body.digest()
    missing = [f for f in man.get("files", []) if not os.path.exists(os.path.join(out, f))]
    ctx.say(f"report {out}: command {man.get('command')}, verdict {verdict}, "
            f"manifest {'intact' if intact else 'MODIFIED'}"
            + (f", missing files {missing}" if missing else ""))
    ok = intact and not missing and verdict in (PASS, NO_ACCUMULATION) and verdict == man.get("verdict")
    return 0 if ok else 1


DISPATCH = {"validate": cmd_validate, "levi": cmd_levi, "psh-check": cmd_psh, "disc": cmd_disc,
            "kobayashi": cmd_kobayashi, "scale": cmd_scale, "wong-rosay": cmd_wong_rosay,
            "compactness": cmd_compactness, "report": cmd_report}


def _fail(code, msg):
    print(f"acx: error: {' '.join(str(msg).split())}", file=sys.stderr)
    return code


def run(argv=None):
    """Execute one subcommand and return its exit code (0, 1 or 2)."""
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise ConfigError(f"a subcommand is required: {', '.join(COMMANDS)}")
        _check_flags(args)
        cfg = load_config(args.config) if args.config else None
        ctx = Context(args, cfg)
        return DISPATCH[args.command](ctx)
    except ConfigError as exc:
        errs = exc.errors
        more = f" (+{len(errs) - 1} more)" if len(errs) > 1 else ""
        return _fail(2, errs[0] + more)
    except INPUT_ERRORS as exc:
        return _fail(2, f"{type(exc).__name__}: {exc}")
    except AcxError as exc:
        return _fail(1, f"{type(exc).__name__}: {exc}")
    except SystemExit as exc:  # argparse --help
        return 0 if exc.code in (0, None) else 2
    except Exception as exc:
        return _fail(1, f"internal error: {type(exc).__name__}: {exc}")


def main():
    sys.exit(run())
