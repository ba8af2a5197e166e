"""The ten acceptance criteria, one test each, at their stated tolerances."""

import filecmp
import math
import time
from pathlib import Path

import numpy as np
import pytest

from pqwolff import (IterationConfig, Measure, NFunction, SublinearLaw, WolffConfig, check_growth_envelopes,
                     check_sufficient, g_eval, g_inv, log_grid, recursion_limits, solve, verify_lambda_inequality,
                     verify_lower_bound, verify_sandwich, wolff_p_point, wolff_point, wolff_radial_profile)
from pqwolff.bounds import sandwich_envelope
from pqwolff.cli import main as cli_main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
QUAD_TOL = 1e-8  # Wolff quadrature tolerance of the fixed-point fixture


@pytest.fixture(scope="module")
def fixed_point_run():
    law = SublinearLaw(0.25, NFunction(2.0, 3.0, 3))
    sigma = Measure.uniform_ball(3, c=0.01)
    wcfg = WolffConfig(A=1.0, rel_tol=QUAD_TOL)
    # warm the compiled kernels so the timing measures the solve only
    wolff_point(law.nf, sigma, 0.5, wcfg)
    cfg = IterationConfig(epsilon="auto", max_iters=200, residual_rel_tol=1e-8,
                          grid=log_grid(1e-4, 1e4, 401), wolff_cfg=wcfg)
    t0 = time.perf_counter()
    u, rep = solve(law, sigma, cfg)
    elapsed = time.perf_counter() - t0
    return law, sigma, wcfg, cfg, u, rep, elapsed


def test_criterion_01_newtonian_golden(record):
    nf = NFunction(2.0, 2.0, 3)
    atom = Measure.atom(3, mass=1.0)
    grid = log_grid(1e-3, 1e3, 400)
    wolff_radial_profile(nf, atom, grid[:3])  # compile outside the timed region
    t0 = time.perf_counter()
    w = wolff_radial_profile(nf, atom, grid).values
    wp = np.array([wolff_p_point(2.0, 3, atom, r) for r in grid])
    elapsed = time.perf_counter() - t0
    err_g = float(np.max(np.abs(w * 2 * grid - 1.0)))
    err_p = float(np.max(np.abs(wp * grid - 1.0)))
    ok = err_g <= 1e-6 and err_p <= 1e-6 and elapsed < 1.0
    record(1, ok, f"max rel err W_G {err_g:.2e}, W_2 {err_p:.2e} (<=1e-6); {elapsed:.3f}s (<1s)")
    assert ok


def test_criterion_02_uniform_ball_golden(record):
    v = wolff_point(NFunction(2.0, 2.0, 3), Measure.uniform_ball(3), 0.0)
    err = abs(v / math.pi - 1.0)
    ok = err <= 1e-4
    record(2, ok, f"W_G(0) = {v:.15f}, rel err {err:.2e} (<=1e-4)")
    assert ok


def test_criterion_03_envelopes_and_roundtrip(record):
    nf = NFunction(2.0, 3.0, 3)
    rng = np.random.default_rng(2024)
    samples = np.c_[10 ** rng.uniform(-6, 6, 10_000), 10 ** rng.uniform(-3, 3, 10_000)]
    rep = check_growth_envelopes(nf, samples, tol=1e-9)
    worst = min(rep.worst_slack.values())
    s = np.concatenate([[0.0], np.logspace(-12, 12, 20_001), rng.uniform(0.0, 1e12, 5000)])
    s = s[s <= 1e12]
    rt = float(np.max(np.abs(g_eval(nf, g_inv(nf, s)) - s) / np.maximum(s, 1.0)))
    ok = rep.passed and len(rep.worst_slack) == 7 and worst >= -1e-9 and rt <= 1e-10
    record(3, ok, f"7 families, worst slack {worst:.2e} (>=-1e-9); round trip {rt:.2e} (<=1e-10)")
    assert ok


def test_criterion_04_fixed_point(record, fixed_point_run):
    law, sigma, wcfg, cfg, u, rep, elapsed = fixed_point_run
    fine = IterationConfig(epsilon="auto", max_iters=200, residual_rel_tol=1e-8,
                           grid=log_grid(1e-4, 1e4, 801), wolff_cfg=wcfg)
    u2, rep2 = solve(law, sigma, fine)
    common = u2.values[::2]
    assert np.array_equal(u2.radii[::2], u.radii)
    drift = float(np.max(np.abs(common - u.values)) / u.sup())
    ok = (rep.converged and rep.iterations <= 200 and rep.min_increment() >= -1e-12
          and rep.final_residual <= 1e-6 and drift < 5 * QUAD_TOL and elapsed < 60.0)
    record(4, ok, f"converged in {rep.iterations} its, min increment {rep.min_increment():.1e}, "
                  f"residual {rep.final_residual:.1e}, grid-doubling drift {drift:.1e} (<{5 * QUAD_TOL:.0e}), "
                  f"{elapsed:.1f}s (<60s)")
    assert ok


def test_criterion_05_lower_bound(record, fixed_point_run):
    law, sigma, wcfg, cfg, u, rep, _ = fixed_point_run
    c_star = recursion_limits(3, 2.0, 3.0, 0.25).C_star
    r = verify_lower_bound(law, sigma, u, c_star, wcfg)
    ok = r.passed and r.details["min_ratio"] >= c_star * (1 - 1e-6)
    record(5, ok, f"min u/(W_G sigma)^(4/3) = {r.details['min_ratio']:.4f} >= C_star = {c_star:.6e}")
    assert ok


def test_criterion_06_lambda_inequality(record):
    grid = log_grid(1e-3, 1e3, 121)
    out = []
    for p, q, alpha in [(2.0, 2.0, 1.0), (2.0, 3.0, 1 / 3)]:
        r = verify_lambda_inequality(NFunction(p, q, 3), Measure.uniform_ball(3), alpha, grid)
        out.append((p, q, alpha, r))
    ok = all(r.passed for *_, r in out)
    record(6, ok, "; ".join(f"p={p:g},q={q:g}: min ratio/lambda = {r.details['min_ratio'] / r.params['lambda']:.3f}"
                            for p, q, _, r in out))
    assert ok


def test_criterion_07_sandwich(record):
    nf = NFunction(2.0, 3.0, 4)
    grid = log_grid(1e-3, 1e3, 121)
    r = verify_sandwich(nf, Measure.uniform_ball(4), grid)
    lo, hi = sandwich_envelope(nf)
    nf2 = NFunction(2.0, 2.0, 3)
    atom = Measure.atom(3)
    exact = wolff_radial_profile(nf2, atom, grid, WolffConfig(A="n_omega_n")).values
    plain = wolff_radial_profile(nf2, atom, grid).values
    err = float(np.max(np.abs(exact / plain * 4 * math.pi - 1.0)))
    ok = r.passed and err <= 1e-9
    record(7, ok, f"n=4 ratio in [{r.details['min_ratio']:.4f}, {r.details['max_ratio']:.4f}] "
                  f"within [{lo:.4f}, {hi:.4f}]; atom ratio vs 1/(4 pi) rel err {err:.1e} (<=1e-9)")
    assert ok


def test_criterion_08_recursion(record):
    lines, ok = [], True
    for gamma in (0.1, 0.25, 0.4):
        a = recursion_limits(3, 2.0, 3.0, gamma, j_max=200, c1=1e-6)
        b = recursion_limits(3, 2.0, 3.0, gamma, j_max=200, c1=0.9)
        d_ok = 0 < a.delta_steps <= 200 and abs(a.delta_seq[-1] - 1 / (1 - gamma)) <= 1e-12
        c_gap = abs(a.c_seq[-1] / b.c_seq[-1] - 1.0)
        ok &= d_ok and c_gap <= 1e-10
        lines.append(f"gamma={gamma}: delta steps {a.delta_steps}, c1 gap {c_gap:.0e}, "
                     f"closed form/C_star - 1 = {a.to_dict()['C_mismatch_rel']:.3f}")
    record(8, ok, "; ".join(lines) + " (closed-form mismatch reported, not asserted)")
    assert ok


def test_criterion_09_conditions(record, tmp_path, capsys):
    law = SublinearLaw(0.25, NFunction(2.0, 3.0, 4))
    sigma = Measure.uniform_ball(4, c=0.01)
    a = check_sufficient(law, sigma, resolution=1)
    b = check_sufficient(law, sigma, resolution=2)
    finite = a["status"] == "finite" and len(a["entries"]) == 6
    drift = max(abs(b["entries"][k]["value_estimate"] / a["entries"][k]["value_estimate"] - 1.0) for k in a["entries"])
    code = cli_main(["check", "--config", str(CONFIGS / "conditions_atom.yaml"), "--out", str(tmp_path), "--quiet"])
    capsys.readouterr()
    hom = check_sufficient(SublinearLaw(0.25, NFunction(2.0, 2.0, 4)), sigma)["entries"]
    pair = max(abs(hom["Wp^" + k.split("^", 1)[1]]["value_estimate"] / v["value_estimate"] - 1.0)
               for k, v in hom.items() if k.startswith("Wq"))
    ok = finite and drift <= 1e-3 and code == 3 and pair <= 1e-9
    record(9, ok, f"six integrals finite, refinement drift {drift:.1e} (<=1e-3); atom exit code {code}; "
                  f"p=q pairwise gap {pair:.1e} (<=1e-9)")
    assert ok


ACCEPTANCE_CONFIGS = [
    ("wolff", "newtonian_atom.yaml"), ("wolff", "uniform_ball.yaml"), ("wolff", "zero_measure.yaml"),
    ("solve", "fixed_point.yaml"), ("verify", "verify_lambda.yaml"), ("verify", "sandwich.yaml"),
    ("check", "conditions_density.yaml"), ("check", "conditions_atom.yaml"),
]


def test_criterion_10_determinism(record, tmp_path, capsys):
    mismatched, nfiles = [], 0
    for cmd, name in ACCEPTANCE_CONFIGS:
        outs = []
        for k in range(2):
            out = tmp_path / f"{name}-{k}"
            cli_main([cmd, "--config", str(CONFIGS / name), "--out", str(out), "--quiet"])
            outs.append(out)
        files = sorted(p.name for p in outs[0].iterdir())
        assert files == sorted(p.name for p in outs[1].iterdir())
        nfiles += len(files)
        _, bad, errs = filecmp.cmpfiles(outs[0], outs[1], files, shallow=False)
        mismatched += bad + errs
    out1, out2 = [], []
    for out in (out1, out2):
        cli_main(["constants", "--config", str(CONFIGS / "constants.yaml")])
        out.append(capsys.readouterr().out)
    capsys.readouterr()
    ok = not mismatched and out1 == out2 and nfiles > 0
    record(10, ok, f"{nfiles} output files from {len(ACCEPTANCE_CONFIGS)} configs plus constants stdout "
                   f"byte-identical on rerun; mismatches: {mismatched or 'none'}")
    assert ok
