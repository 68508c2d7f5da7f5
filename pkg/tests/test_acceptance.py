"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; a
summary table is printed at the end of the module either way.
"""
import json
import time

import numpy as np
import pytest

from acxkit.cli import run
from acxkit.core import (STANDARD, Ball, DeformationData, DeformationStructure, Polydisc,
                         PolynomialDefiningFunction, TransportedStructure, AffineMap, levi_form,
                         validate_structure)
from acxkit.disc import SolverConfig, c1_c0_ratio, cauchy_green, get_grid, solve_disc
from acxkit.harness import PASS, NO_ACCUMULATION, compactness_verdict, limit_biholomorphism, make_scenario
from acxkit.kobayashi import (boundary_blowup_experiment, kr_distance, kr_metric,
                              localization_experiment)
from acxkit.scaling import ModelDomain, SiegelMap, convergence_report, scaling_sequence, siegel_rho

from conftest import random_defining_function, random_deformation
from oracles import ball_automorphism, cauchy_green_quadrature, levi_circulation, poincare_distance_ball

from pathlib import Path

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
RESULTS = {}
LN2_HALF = 0.5 * np.log(2)


def report(capsys, n, name, ok, detail):
    line = f"criterion {n:2d} [{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    RESULTS[n] = line
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    tr = request.config.pluginmanager.get_plugin("terminalreporter")
    if tr is not None:
        tr.write_line("")
        tr.write_line("acceptance summary")
        for n in sorted(RESULTS):
            tr.write_line(RESULTS[n])


def cubic_function():
    return PolynomialDefiningFunction.from_table(
        {"z2": 2.0, "z1*z1b": 1.0, "z2*z2b": 1.0, "z1^2*z1b": 0.5, "z1*z1b^2": 0.5})


def test_01_structure_validity(capsys):
    rng = np.random.default_rng(1)
    inner = Polydisc((0, 0), (0.7, 0.7))      # inside the unit validity ball
    fields = [("J_st", STANDARD, inner),
              ("A1=0.2 z1", DeformationStructure(DeformationData.from_tables({"z1": 0.2})), inner)]
    for k in range(4):
        d = random_deformation(rng, size=0.1)
        fields.append((f"random {k}", DeformationStructure(d), inner))
        T = AffineMap.dilation(4.0 ** -(k + 2))
        fields.append((f"dilated {k}", TransportedStructure(DeformationStructure(d), T), Polydisc()))
    s = make_scenario("perturbed", nu_max=2)
    fields.append(("pushforward", s.J_family(1), inner))
    steps = scaling_sequence(cubic_function(), lambda nu: np.array([0, -4.0 ** -nu]),
                             lambda nu: DeformationStructure(DeformationData({(1, 0, 0, 0): 0.1 / nu})), 3)
    fields += [(f"scaled nu={st.nu}", st.Jt, Polydisc()) for st in steps]
    worst = 0.0
    for name, J, region in fields:
        rep = validate_structure(J, region, 17, derivatives=False)
        assert rep.n_points == 17 ** 4
        worst = max(worst, rep.max_residual)
    report(capsys, 1, "structure validity", worst <= 1e-10,
           f"max |J^2 + I| = {worst:.2e} over {len(fields)} fields on 17^4 grids")


def test_02_levi_oracle(capsys):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        r = random_defining_function(rng)
        J = DeformationStructure(random_deformation(rng))
        p = 0.4 * (rng.normal(size=2) + 1j * rng.normal(size=2)) / np.sqrt(8)
        X = rng.normal(size=2) + 1j * rng.normal(size=2)
        want = levi_circulation(r.gradient, J, p, X)
        got = levi_form(r, J, p, X)
        worst = max(worst, abs(got - want) / abs(want))
    report(capsys, 2, "Levi form vs circulation oracle", worst <= 1e-6,
           f"max relative error {worst:.2e} on 100 tuples")


def test_03_levi_at_origin(capsys):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(20):
        d = random_deformation(rng, size=0.1)
        K = 0.5 * (rng.normal(size=3) + 1j * rng.normal(size=3))
        h = rng.normal(size=2)
        table = {"z2": 2.0, "z1^2": list(2 * np.array([K[0].real, K[0].imag])),
                 "z1*z2": [2 * K[1].real, 2 * K[1].imag], "z2^2": [2 * K[2].real, 2 * K[2].imag],
                 "z1*z1b": 1.0 + abs(h[0]), "z2*z2b": 1.0 + abs(h[1]),
                 "z1*z2b": [0.3 * rng.normal(), 0.3 * rng.normal()],
                 "z1^2*z1b": [0.2 * rng.normal(), 0.2 * rng.normal()]}
        r = PolynomialDefiningFunction.from_table(table)
        X = np.array([rng.normal() + 1j * rng.normal(), 0])
        a = levi_form(r, DeformationStructure(d), np.zeros(2), X)
        b = levi_form(r, STANDARD, np.zeros(2), X)
        worst = max(worst, abs(a - b))
    report(capsys, 3, "Levi forms under J and J_st agree at 0", worst <= 1e-8,
           f"max difference {worst:.2e} over 20 deformations")


def test_04_disc_solver(capsys):
    rng = np.random.default_rng(4)
    seed_err = 0.0
    for _ in range(5):
        p = 0.2 * (rng.normal(size=2) + 1j * rng.normal(size=2))
        v = 0.3 * (rng.normal(size=2) + 1j * rng.normal(size=2))
        c = [0.05 * (rng.normal(size=2) + 1j * rng.normal(size=2)) for _ in range(2)]
        f = solve_disc(DeformationData(), p, v, SolverConfig(N=64), seed_coeffs=c)
        z = f.grid.zeta
        h = p[:, None, None] + v[:, None, None] * z + c[0][:, None, None] * z ** 2 + c[1][:, None, None] * z ** 3
        seed_err = max(seed_err, float(np.abs(f.values - h).max()))
    d = DeformationData.from_tables({"z1": 0.2})
    p, v = np.array([0.1, 0.05j]), np.array([0.4, 0.2])
    fs = {N: solve_disc(d, p, v, SolverConfig(N=N, tol=1e-13)) for N in (64, 128, 256)}
    zs = 0.9 * np.sqrt(np.linspace(0, 1, 40)) * np.exp(2j * np.pi * np.arange(40) / 40)
    e1 = np.abs(fs[64].evaluate(zs) - fs[128].evaluate(zs)).max()
    e2 = np.abs(fs[128].evaluate(zs) - fs[256].evaluate(zs)).max()
    factor = e1 / e2
    res = fs[64].residual
    ok = seed_err <= 1e-12 and res <= 1e-8 and factor >= 3
    report(capsys, 4, "disc solver", ok,
           f"seed error {seed_err:.1e}, residual(N=64) {res:.2e}, self-convergence factor {factor:.1f}")


def test_05_cauchy_green(capsys):
    g = get_grid(64)
    T = cauchy_green(np.ones((64, 64)), g)
    one = lambda w: np.ones_like(w)  # noqa: E731
    oracle = np.array([cauchy_green_quadrature(one, z) for z in g.zeta.ravel()]).reshape(64, 64)
    err = float(np.abs(T - oracle).max())
    exact = float(np.abs(oracle - np.conj(g.zeta)).max())
    report(capsys, 5, "Cauchy-Green T(1) = conj(zeta)", err <= 1e-4 and exact <= 1e-4,
           f"sup |T1 - quadrature| = {err:.2e}; oracle vs conj(zeta) {exact:.1e}")


def test_06_kobayashi_ball(capsys):
    B = Ball()
    m = kr_metric(B, None, np.zeros(2), np.array([1.0, 0])).upper
    d = kr_distance(B, None, np.zeros(2), np.array([0.5, 0]), 32)
    a, b = np.array([0.1, 0.1j]), np.array([-0.2, 0.15])
    phi = ball_automorphism(np.array([0.3, 0.2j]))
    d1 = kr_distance(B, None, a, b, 16)
    d2 = kr_distance(B, None, phi(a), phi(b), 16)
    inv = abs(d2 - d1) / d1
    truth = poincare_distance_ball(a, b)
    ok = abs(m - 1) <= 0.05 and abs(d - np.arctanh(0.5)) <= 0.1 * np.arctanh(0.5) and inv <= 0.1
    report(capsys, 6, "Kobayashi ball oracle", ok,
           f"metric {m:.6f}, d(0,(0.5,0)) = {d:.6f} vs {np.arctanh(0.5):.6f}, "
           f"Mobius change {inv:.1e} (pair distance {d1:.4f}, exact {truth:.4f})")


def test_07_boundary_blowup(capsys):
    t = boundary_blowup_experiment(Ball(), None, np.array([1.0, 0]), np.zeros(2), [1, 2, 3, 4, 5],
                                   lattice_n=16)
    inc = np.array(t.increments)
    increasing = bool(np.all(inc > 0))
    last = abs(inc[-1] - LN2_HALF) / LN2_HALF
    ok = increasing and last <= 0.15
    report(capsys, 7, "boundary blow-up", ok,
           "increments " + ", ".join(f"{x:.4f}" for x in inc) + f" (target {LN2_HALF:.4f}, last off by {last:.1%})")


def test_08_localization(capsys):
    ratios = {}
    for name, d in (("J_st", None), ("A1=0.2 z1", DeformationData.from_tables({"z1": 0.2}))):
        res = localization_experiment(d, deltas=(1e-1, 1e-2, 1e-3), ensemble_size=10, r0_list=(0.2,))
        ratios[name] = res.ratios[0.2]
    ok = all(v <= 3 for v in ratios.values())
    report(capsys, 8, "disc localization", ok,
           ", ".join(f"{k}: max/min C = {v:.3f}" for k, v in ratios.items()) + " at r0 = 0.2")


def test_09_scaling_convergence(capsys):
    r = cubic_function()
    orbit = lambda nu: np.array([0, -4.0 ** -nu])  # noqa: E731
    rep = convergence_report(scaling_sequence(r, orbit, None, 8))
    dev = rep.column("domain_dev")
    ratios = dev[1:] / dev[:-1]
    dom_ok = bool(np.all(np.abs(ratios - 0.5) <= 0.3 * 0.5))
    st_zero = bool(np.all(rep.column("structure_dev") == 0))
    J = lambda nu: DeformationStructure(DeformationData({(1, 0, 0, 0): 0.1 / nu}))  # noqa: E731
    steps = scaling_sequence(r, orbit, J, 8)
    prep = convergence_report(steps)
    sdev = prep.column("structure_dev")
    bound = np.array([0.1 / s.nu * (np.sqrt(s.tau) + 1) for s in steps])
    pert_ok = bool(np.all(sdev <= bound))
    report(capsys, 9, "scaling convergence", dom_ok and st_zero and pert_ok,
           "domain ratios " + ", ".join(f"{x:.3f}" for x in ratios)
           + f"; J_st column zero: {st_zero}; perturbed max dev/bound {np.max(sdev / bound):.3f}")


def test_10_siegel_identity(capsys):
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(10):
        m = ModelDomain(alpha=rng.uniform(0.1, 4), lam11=complex(*rng.normal(size=2)), beta=rng.uniform(0.5, 4))
        z = rng.normal(size=(1000, 2)) + 1j * rng.normal(size=(1000, 2))
        worst = max(worst, float(np.abs(siegel_rho(SiegelMap(m)(z)) - m.rho(z)).max()))
    report(capsys, 10, "Siegel identity", worst <= 1e-12, f"max |Re Phi2 + |Phi1|^2 - rho| = {worst:.1e}")


def test_11_wong_rosay(capsys, tmp_path):
    t0 = time.perf_counter()
    res = limit_biholomorphism(make_scenario("mobius"), K=Ball((0, 0), 0.5))
    code = run(["wong-rosay", "--config", str(CONFIGS / "rotation.cfg"), "--out", str(tmp_path)])
    out = capsys.readouterr().out
    rot = compactness_verdict(make_scenario("rotation"))
    dt = time.perf_counter() - t0
    dg = res.diagnostics
    ok = (res.verdict == PASS and dg["inverse_err"] <= 1e-4 and dg["cr_residual"] <= 1e-3
          and "no accumulation" in out and code == 1 and rot.verdict == NO_ACCUMULATION and dt <= 300)
    report(capsys, 11, "Wong-Rosay end to end", ok,
           f"Mobius {res.verdict} (inverse {dg['inverse_err']:.1e}, CR {dg['cr_residual']:.1e}); "
           f"rotation: {rot.message}; {dt:.1f} s")


def c2_bound(d):
    """Upper bound for sup |A| + sup |DA| + sup |D^2 A| on the unit ball, from coefficients."""
    out = 0.0
    for a in d.A:
        out = max(out, sum(abs(c) * (1 + k + k * (k - 1)) for e, c in a.terms.items() for k in [sum(e)]))
    return out


def test_12_elliptic_estimate(capsys):
    rng = np.random.default_rng(12)
    ratios = []
    while len(ratios) < 50:
        d = random_deformation(rng, size=0.05, terms=2)
        s = c2_bound(d)
        if s > 0.1:
            d = DeformationData(d.A1.scaled(0.1 / s), d.A2.scaled(0.1 / s))
        assert c2_bound(d) <= 0.1 + 1e-12
        p = 0.3 * (rng.normal(size=2) + 1j * rng.normal(size=2)) / np.sqrt(4)
        v = 0.3 * (rng.normal(size=2) + 1j * rng.normal(size=2)) / np.sqrt(4)
        f = solve_disc(d, p, v, SolverConfig(N=32))
        ratios.append(c1_c0_ratio(f, K=0.5))
    worst = max(ratios)
    report(capsys, 12, "elliptic estimate diagnostic", worst <= 10,
           f"max c1/c0 ratio {worst:.3f} over {len(ratios)} discs")


RUNS = [("scale", "static.cfg"), ("scale", "static_perturbed.cfg"), ("wong-rosay", "mobius.cfg"),
        ("compactness", "mixed.cfg"), ("compactness", "rotation.cfg"), ("compactness", "bidisc.cfg")]


def test_13_determinism(capsys, tmp_path):
    same = []
    for cmd, cfg in RUNS:
        blobs = []
        for rep in ("a", "b"):
            out = tmp_path / rep / f"{cmd}_{cfg}"
            run([cmd, "--config", str(CONFIGS / cfg), "--out", str(out), "--seed", "7", "--quiet"])
            blobs.append((out / "manifest.json").read_bytes())
        json.loads(blobs[0])
        same.append(blobs[0] == blobs[1])
    report(capsys, 13, "determinism", all(same),
           f"{sum(same)}/{len(same)} run manifests byte-identical across two runs")
