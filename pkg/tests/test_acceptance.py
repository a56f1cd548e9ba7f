"""End-to-end acceptance checks, one test per criterion."""
import itertools
import json
import math
import time

import pytest

from harmonic_entropy import cli
from harmonic_entropy.distributions import Finite, Geometric, Zeta
from harmonic_entropy.oracle import exhaustive_bias, lecam_two_point
from harmonic_entropy.simulation import (
    SimulationConfig,
    normality_check,
    rate_slope,
    run_simulation,
)

GEOMETRIC = {"family": "geometric", "p": 0.1}


@pytest.fixture(scope="module")
def geometric_2000():
    """500 paired replicates at n = 2000, shared by the variance and CLT criteria."""
    cfg = SimulationConfig(GEOMETRIC, [2000], 500, base_seed=20240, estimators=["harmonic"])
    return run_simulation(cfg)


def test_identity_suite(record_criterion, capsys):
    t0 = time.perf_counter()
    code = cli.main(["verify"])
    elapsed = time.perf_counter() - t0
    rows = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    by_name = {}
    for r in rows:
        name = r.get("identity_name", r.get("check_name"))
        by_name[name] = by_name.get(name, 0) + 1
    ok = code == 0 and all(r["pass"] for r in rows) and elapsed < 60
    # grid coverage: 25 n-values x 8 p-values for both binomial moments, 12 x 6 for the
    # closed forms, 12 x 4 for the joint product, 3 dilog points
    ok &= by_name.get("first_moment") == 200 and by_name.get("second_moment") == 200
    ok &= by_name.get("harmonic_binomial") == 72 and by_name.get("reciprocal_binomial") == 72
    ok &= by_name.get("multinomial_product") == 48 and by_name.get("dilog_double_series") == 3
    record_criterion(1, ok, f"{len(rows)} reports, exit {code}, {elapsed:.1f}s")
    assert ok


def test_bias_oracle_equivalence(record_criterion):
    t0 = time.perf_counter()
    pmfs = [
        [1.0], [0.5, 0.5], [0.9, 0.1], [0.7, 0.3], [0.99, 0.01],
        [1 / 3] * 3, [0.5, 0.3, 0.2], [0.6, 0.25, 0.15], [0.8, 0.1, 0.1], [0.45, 0.45, 0.1],
    ]
    worst = 0.0
    count = 0
    for probs, n in itertools.product(pmfs, range(2, 7)):
        pmf = Finite(probs)
        worst = max(worst, abs(exhaustive_bias(pmf, n) - pmf.exact_bias(n)))
        count += 1
    elapsed = time.perf_counter() - t0
    ok = count >= 40 and worst <= 1e-10 and elapsed < 10
    record_criterion(2, ok, f"{count} instances, max gap {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_entropy_constants(record_criterion):
    cases = [
        ("5-point", Finite([0.5, 0.2, 0.15, 0.1, 0.05]), 1.333074),
        ("uniform-500", Finite.uniform(500), 6.214608),
        ("geometric 0.1", Geometric(0.1), 3.250830),
        ("zeta 2", Zeta(2.0), 1.637622),
    ]
    gaps = {name: abs(pmf.entropy() - ref) for name, pmf, ref in cases}
    ok = all(g <= 5e-6 for g in gaps.values())
    record_criterion(3, ok, ", ".join(f"{k} gap {v:.1e}" for k, v in gaps.items()))
    assert ok


def test_mse_rate(record_criterion):
    t0 = time.perf_counter()
    grid = list(range(200, 2001, 200))
    res = run_simulation(
        SimulationConfig(GEOMETRIC, grid, 200, base_seed=4, estimators=["harmonic"])
    )
    slope = rate_slope([(n, res.cell("harmonic", n).mse) for n in grid])
    elapsed = time.perf_counter() - t0
    ok = -1.25 <= slope <= -0.75 and elapsed < 180
    record_criterion(4, ok, f"MSE slope {slope:.3f}, {elapsed:.1f}s")
    assert ok


def test_bias_phase_transition(record_criterion):
    t0 = time.perf_counter()
    z = Zeta(2.0)
    pts = [(2**k, abs(z.exact_bias(2**k))) for k in range(7, 15)]
    slope = rate_slope(pts)
    lecam = [lecam_two_point(1 / math.sqrt(n), n) for n in (25, 100, 400, 10000)]
    lecam_ok = all(r.kl_ok and r.gap_ok for r in lecam)
    elapsed = time.perf_counter() - t0
    ok = -0.6 <= slope <= -0.4 and lecam_ok and elapsed < 30
    record_criterion(5, ok, f"zeta bias slope {slope:.3f}, two-point checks {lecam_ok}, "
                            f"{elapsed:.1f}s")
    assert ok


def test_efficiency_constant(record_criterion, geometric_2000):
    cell = geometric_2000.cell("harmonic", 2000)
    target = Geometric(0.1).var_log_p() / 2000
    ratio = cell.empirical_variance / target
    ok = 0.7 <= ratio <= 1.3 and cell.estimates.size >= 500
    record_criterion(6, ok, f"variance / (Var[log p]/n) = {ratio:.3f}")
    assert ok


def test_clt(record_criterion, geometric_2000):
    n = 2000
    truth = geometric_2000.true_entropy
    est = geometric_2000.cell("harmonic", n).estimates
    ks = normality_check(math.sqrt(n) * (est - truth)).ks_statistic
    critical = 1.63 / math.sqrt(est.size)
    # boundary case, reported only
    zres = run_simulation(SimulationConfig({"family": "zeta", "gamma": 2.0}, [n], 500,
                                           base_seed=20240, estimators=["harmonic"]))
    zest = zres.cell("harmonic", n).estimates
    zks = normality_check(math.sqrt(n) * (zest - zres.true_entropy)).ks_statistic
    ok = ks < critical
    record_criterion(7, ok, f"geometric KS {ks:.4f} < {critical:.4f}; "
                            f"zeta KS {zks:.4f} (informational)")
    assert ok


def test_uniform_ordering(record_criterion):
    grid = list(range(60, 601, 60))
    res = run_simulation(SimulationConfig({"family": "uniform", "size": 500}, grid, 100,
                                          base_seed=8, estimators=["harmonic", "plugin"]))
    wins = sum(res.cell("harmonic", n).mse < res.cell("plugin", n).mse for n in grid)
    ok = wins >= 9
    record_criterion(8, ok, f"harmonic MSE below plug-in in {wins}/10 cells")
    assert ok


def test_determinism(record_criterion, tmp_path, capsys):
    cfg = {
        "distribution": {"family": "zeta", "gamma": 2.0},
        "n_grid": [10, 100, 1000],
        "replicates": 60,
        "base_seed": 12345,
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    outs = []
    for i, workers in enumerate(("1", "1", "2", "4")):
        out = tmp_path / f"run{i}"
        assert cli.main(["simulate", "--config", str(path), "--out", str(out),
                         "--workers", workers]) == 0
        outs.append(out)
    capsys.readouterr()
    same = all(
        len({(o / name).read_bytes() for o in outs}) == 1
        for name in ("detail.csv", "aggregate.csv")
    )
    record_criterion(9, same, "4 runs (workers 1, 1, 2, 4) byte-identical" if same
                     else "CSV output differs between runs")
    assert same
