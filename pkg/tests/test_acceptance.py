"""Acceptance criteria, one test each.

Every test appends a single ``PASS``/``FAIL`` line to ``REPORT``; the lines are
printed in the pytest terminal summary. Criteria that the model cannot meet
fail here with their measured values in the line.
"""

import time

import numpy as np
import pytest

from glekin import (
    BarrierSpec,
    Convention,
    InitialState,
    TimeGrid,
    correlation_form,
    decompose,
    integrate_gle,
    kinetics_curves,
    late_window_mean,
    make_noise_model,
    mean_position,
    rate_ratio_by_flux,
    sign_change_rate,
    sign_changes,
    simulate_ensemble,
    transmission,
    variance_closed,
    variance_quadrature,
)
from glekin.cli import run

from .conftest import REPORT

KINDS = ("HN", "HVN", "HAN")
BARRIER = BarrierSpec(1.0)
STATE = InitialState(0.0, 2.0)
GRID = np.round(np.arange(0, 3001) * 0.01, 12)
CONVENTIONS = [Convention(k, r) for k in ("fdt-kernel", "literal-eq2")
               for r in ("symmetric", "half-region")]


def _label(conv):
    return f"{conv.kernel}/{conv.region}"


def _record(number, title, ok, detail, elapsed, limit=None):
    budget = "" if limit is None else f" (limit {limit:g} s)"
    line = f"criterion {number} [{title}]: {'PASS' if ok else 'FAIL'}; {detail}; " \
           f"runtime {elapsed:.2f} s{budget}"
    REPORT.append(line)
    print(line)
    if not ok:
        pytest.fail(line, pytrace=False)


@pytest.fixture(scope="module")
def oracle():
    """Ensemble vs analytic z-scores for every convention (criterion 5)."""
    grid = TimeGrid(5.0, 0.01)
    times = (1.0, 2.0, 4.0)
    out = {}
    start = time.perf_counter()
    for conv in CONVENTIONS:
        worst = 0.0
        for kind in KINDS:
            model = make_noise_model(kind)
            d = decompose(model, BARRIER)
            corr = correlation_form(model, conv)
            # one ensemble per kernel reading; the region only changes the analytic side
            key = (kind, conv.kernel)
            if key not in out:
                out[key] = simulate_ensemble(model, BARRIER, STATE, grid, 10_000, seed=20121,
                                             convention=conv, workers=4)
            res = out[key]
            for t in times:
                i = grid.index(t)
                var = variance_closed(d, corr, t, conv.region)
                chi = kinetics_curves(model, BARRIER, STATE, [t], conv).chi[0]
                se_chi = np.sqrt(chi * (1 - chi) / res.n_traj)
                worst = max(worst, abs(res.var_hat[i] - var) / res.se_var[i],
                            abs(res.chi_hat[i] - chi) / se_chi)
        out[_label(conv)] = worst
    out["elapsed"] = time.perf_counter() - start
    return out


def _validated(oracle):
    return [c for c in CONVENTIONS if oracle[_label(c)] <= 3.0]


def test_criterion_1_chi_oscillation():
    start = time.perf_counter()
    parts, ok = [], True
    for kind in KINDS:
        c = kinetics_curves(make_noise_model(kind), BARRIER, STATE, GRID)
        n = sign_changes(c.chi[GRID >= 5.0], 0.5)
        late = late_window_mean(GRID, c.chi)
        ok &= n >= 5 and 0.4 <= late <= 0.6
        parts.append(f"{kind}: {n} sign changes in [5, 30] (need >= 5), late mean {late:.4f} "
                     f"(need [0.4, 0.6])")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 10
    _record(1, "chi oscillates about 1/2", ok, "; ".join(parts), elapsed, 10)


def test_criterion_2_frequency_ratio():
    start = time.perf_counter()
    rates = {}
    for kind in ("HN", "HAN"):
        c = kinetics_curves(make_noise_model(kind), BARRIER, STATE, GRID)
        rates[kind] = sign_change_rate(GRID, c.chi, 0.5, t_start=15.0)
    ratio = rates["HAN"] / rates["HN"] if rates["HN"] > 0 else float("nan")
    elapsed = time.perf_counter() - start
    ok = bool(4.0 <= ratio <= 6.0) and elapsed < 10
    detail = (f"sign-change rates HN {rates['HN']:.4f}, HAN {rates['HAN']:.4f} per unit time, "
              f"ratio {ratio:.4g} (need [4, 6])")
    _record(2, "HAN/HN frequency ratio", ok, detail, elapsed, 10)


def test_criterion_3_kappa_plateaus(oracle):
    start = time.perf_counter()
    validated = _validated(oracle)
    parts, ok = [], bool(validated)
    for conv in CONVENTIONS:
        late = {}
        for kind in KINDS:
            c = kinetics_curves(make_noise_model(kind), BARRIER, STATE, GRID, conv)
            late[kind] = (late_window_mean(GRID, c.kappa), c.kappa[-1])
        order = late["HAN"][0] > late["HN"][0] > late["HVN"][0]
        bands = (0.38 <= late["HN"][0] <= 0.48 and 0.80 <= late["HAN"][0] <= 0.90
                 and late["HVN"][1] <= 0.05)
        if conv in validated:
            ok &= bands
        ok &= order
        parts.append(f"{_label(conv)}{' (oracle-validated)' if conv in validated else ''}: "
                     f"HN {late['HN'][0]:.4f} (need [0.38, 0.48]), "
                     f"HAN {late['HAN'][0]:.4f} (need [0.80, 0.90]), "
                     f"HVN kappa(30) {late['HVN'][1]:.4f} (need <= 0.05), "
                     f"ordering HAN > HN > HVN {'holds' if order else 'violated'}")
    elapsed = time.perf_counter() - start
    _record(3, "kappa plateaus and ordering", ok, "; ".join(parts), elapsed)


def test_criterion_4_kramers_limit():
    start = time.perf_counter()
    model = make_noise_model("Ohmic", gamma_ohmic=1.0)
    d = decompose(model, BARRIER)
    kappa = transmission(d, correlation_form(model), model, 20.0)
    exact = (np.sqrt(5.0) - 1.0) / 2.0
    pole_err = abs(d.dominant_pole - exact)
    elapsed = time.perf_counter() - start
    ok = abs(kappa - exact) <= 1e-4 and pole_err <= 1e-10 and elapsed < 1
    detail = (f"kappa(20) = {kappa:.10f} vs (sqrt5 - 1)/2 = {exact:.10f} (tol 1e-4); "
              f"pole error {pole_err:.2e} (tol 1e-10)")
    _record(4, "Kramers white-noise limit", ok, detail, elapsed, 1)


def test_criterion_5_oracle_equivalence(oracle):
    default = oracle[_label(Convention())]
    detail = "; ".join(f"{_label(c)} max |z| = {oracle[_label(c)]:.2f}" for c in CONVENTIONS)
    ok = default <= 3.0 and oracle["elapsed"] < 300
    detail += f" (need <= 3 under the default {_label(Convention())})"
    _record(5, "oracle equivalence, N = 1e4", ok, detail, oracle["elapsed"], 300)


def test_criterion_6_internal_identities():
    start = time.perf_counter()
    worst_sum, worst_moment, worst_var, worst_flux = 0.0, 0.0, 0.0, 0.0
    models = [make_noise_model(k) for k in KINDS] + [make_noise_model("Ohmic", gamma_ohmic=1.0)]
    for model in models:
        d = decompose(model, BARRIER)
        corr = correlation_form(model)
        worst_sum = max(worst_sum, abs(np.sum(d.residues)))
        worst_moment = max(worst_moment, abs(np.sum(d.residues * d.poles) - 1.0))
        for t in (0.5, 2.0, 5.0):
            closed = variance_closed(d, corr, t)
            worst_var = max(worst_var, abs(variance_quadrature(d, corr, t) - closed) / closed)
            worst_flux = max(worst_flux, abs(rate_ratio_by_flux(d, corr, model, BARRIER, t)
                                             - transmission(d, corr, model, t)))
    model = make_noise_model("HAN", eta=0.0)
    d = decompose(model, BARRIER)
    errs = []
    for dt in (0.02, 0.01, 0.005):
        g = TimeGrid(5.0, dt)
        x, _ = integrate_gle(model, BARRIER, np.zeros(g.n - 1), STATE, g)
        errs.append(np.max(np.abs(x - mean_position(d, STATE, BARRIER, g.times))))
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    second_order = all(3.2 < r < 4.8 for r in ratios)
    elapsed = time.perf_counter() - start
    ok = (worst_sum <= 1e-10 and worst_moment <= 1e-10 and worst_var <= 1e-6
          and worst_flux <= 1e-6 and second_order and elapsed < 30)
    detail = (f"|sum r| {worst_sum:.1e}, |sum r s - 1| {worst_moment:.1e} (tol 1e-10); "
              f"closed vs quadrature variance rel {worst_var:.1e} (tol 1e-6); "
              f"flux vs closed kappa {worst_flux:.1e} (tol 1e-6); "
              f"integrator error ratios under dt halving {ratios[0]:.2f}, {ratios[1]:.2f} "
              f"(second order: about 4)")
    _record(6, "internal identities", ok, detail, elapsed, 30)


def test_criterion_7_reproducibility(capsys):
    start = time.perf_counter()
    outputs = {}
    for workers in ("1", "8"):
        texts = []
        for extra in ([], ["--flux"]):
            argv = ["simulate", *extra, "--n-traj", "2000", "--t-max", "5", "--seed", "7",
                    "--workers", workers, "--no-timestamp"]
            assert run(argv) == 0
            texts.append(capsys.readouterr().out.encode())
        outputs[workers] = texts
    same = outputs["1"] == outputs["8"]
    elapsed = time.perf_counter() - start
    detail = ("simulate and simulate --flux outputs byte-identical across 1 and 8 workers"
              if same else "outputs differ between 1 and 8 workers")
    _record(7, "reproducibility", same, detail, elapsed)
