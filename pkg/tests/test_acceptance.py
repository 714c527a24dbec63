"""The thirteen acceptance criteria, each at its stated tolerance and time budget.

Every criterion prints one ``PASS``/``FAIL`` line; the lines are collected and
repeated in the terminal summary so they show up in a plain ``pytest -v`` run.
"""

import time

import pytest

from cskernels.suites import run_suite

RESULTS: list[str] = []


def _records(rep, suffix):
    return [r for r in rep.records if r.name.endswith(suffix)]


def closed_form(rep):
    worst = max(r.measured for r in rep.records)
    return worst <= 1e-10 and rep.config["points"] >= 1000, f"max rel err {worst:.2e} on {rep.config['points']} points"


def conservation(rep):
    err = rep.records[0].measured
    ok = err <= 1e-8 and rep.config["n_triples"] >= 50 and set(rep.config["c_values"]) == {-0.5, 0.0, 1.0, 3.0}
    return ok, f"max |mass - 1| {err:.2e}"


def chapman_kolmogorov(rep):
    kinds = {r.params["bc"] for r in rep.records}
    worst = max(r.measured for r in rep.records)
    ok = worst <= 1e-6 and kinds == {"neumann", "dirichlet", "standard"} and rep.config["n_tuples"] >= 20
    return ok, f"max rel err {worst:.2e} over {sorted(kinds)}"


def laplace(rep):
    lams = {r.params["lam"] for r in rep.records}
    worst = max(r.measured for r in rep.records)
    return worst <= 1e-6 and lams == {0.5, 1.0, 4.0}, f"max rel err {worst:.2e}"


def pde_residual(rep):
    order = min(r.measured for r in rep.records)
    return order >= 1.8, f"min observed order {order:.3f}"


def gradient(rep):
    err = rep.records[0].measured
    return err < 1e-6 and rep.config["n_tuples"] >= 100, f"max rel err {err:.2e}"


def hardy(rep):
    reach = [r.measured for r in _records(rep, "extremal_reaches_95pct")]
    over = [r.measured for r in _records(rep, "random_within_bound")]
    ok = len(reach) >= 10 and min(reach) >= 0.95 and max(over) <= 1.02
    return ok, f"{len(reach)} triples, extremal >= {min(reach):.3f} C, measured <= {max(over):.3f} C"


def sab_threshold(rep):
    verdicts = _records(rep, "verdict_matches_condition")
    ok = len(verdicts) >= 2 * 75 and all(r.passed for r in rep.records)
    return ok, f"{len(verdicts)} verdicts (5x5x3 grid, kappa 4 and 8) all match"


def muckenhoupt(rep):
    points = {r.name.split("/")[0] for r in rep.records}
    outside = [r.measured for r in _records(rep, "exceeds_1e3")]
    ok = len(points) >= 12 and min(outside) > 1e3 and all(r.passed for r in rep.records)
    return ok, f"{len(points)} samples, out-of-class estimates >= {min(outside):.2e}"


def rellich(rep):
    info = [rep.info[f"N={n}"] for n in (0, 1)]
    worst = max(i["max_random"] for i in info)
    near = min(i["near_extremal"] for i in info)
    return worst <= 4 * 1.05 and near >= 3.2, f"max ratio {worst:.3f}, near-extremal {near:.3f}"


def domain_limit(rep):
    return rep.passed, f"{len(rep.records)} boundary-limit checks"


def closedness(rep):
    drift = [r.measured for r in _records(rep, "refinement_drift")]
    growth = [r.measured for r in _records(rep, "inadmissible_growth")]
    points = {r.name.split("/")[0] for r in _records(rep, "refinement_drift")}
    ok = len(points) >= 3 and max(drift) < 0.10 and min(growth) >= 10 and all(r.passed for r in rep.records)
    return ok, f"{len(points)} points, max drift {max(drift):.3f}, inadmissible growth {min(growth):.1f}"


def rademacher(rep):
    growth = [r.measured for r in rep.records if "/growth_" in r.name]
    ps = {r.name.split(",")[0] for r in rep.records if "/growth_" in r.name}
    ok = ps == {"p=1.5", "p=2.0", "p=3.0"} and max(growth) < 0.15 and all(r.passed for r in rep.records)
    return ok, f"max growth per doubling {max(growth):.3f}"


CRITERIA = [
    (1, "closed-form", {}, 1, closed_form),
    (2, "conservation", {}, 5, conservation),
    (3, "chapman-kolmogorov", {}, 30, chapman_kolmogorov),
    (4, "laplace", {}, 30, laplace),
    (5, "pde-residual", {}, 10, pde_residual),
    (6, "gradient", {}, 5, gradient),
    (7, "hardy", {}, 20, hardy),
    (8, "sab-threshold", {}, 60, sab_threshold),
    (9, "muckenhoupt", {}, 30, muckenhoupt),
    (10, "rellich", {"N": [0, 1]}, 60, rellich),
    (11, "domain-limit", {}, 10, domain_limit),
    (12, "closedness", {}, 120, closedness),
    (13, "rademacher", {}, 120, rademacher),
]


@pytest.mark.parametrize("number, suite, cfg, budget, judge", CRITERIA, ids=[f"{c[0]:02d}-{c[1]}" for c in CRITERIA])
def test_criterion(number, suite, cfg, budget, judge):
    start = time.perf_counter()
    rep = run_suite(suite, dict(cfg))
    elapsed = time.perf_counter() - start
    ok, detail = judge(rep)
    ok = ok and rep.passed and elapsed < budget
    line = f"criterion {number:2d} {suite:20s} {'PASS' if ok else 'FAIL'}  {elapsed:6.2f}s/{budget}s  {detail}"
    RESULTS.append(line)
    print(line)
    assert rep.passed, [r.to_dict() for r in rep.failures()]
    assert elapsed < budget
    assert ok, detail
