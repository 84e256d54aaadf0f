"""Acceptance criteria, run against two full default-config suite runs.

Each test records one pass/fail line, printed in the terminal summary.
"""
import math

import pytest

from conftest import ACCEPTANCE_LINES
from lipdist.config import SuiteConfig
from lipdist.report import report_json
from lipdist.suite import run_suite


@pytest.fixture(scope="module")
def runs():
    cfg = SuiteConfig()
    first = run_suite(cfg)
    second = run_suite(cfg)
    return first, second


@pytest.fixture(scope="module")
def records(runs):
    report = runs[0]
    assert not report.errored, [r for r in report.records if r["status"] == "errored"]
    return {r["name"]: r for r in report.records}


def _group(records, prefix):
    out = {k: v for k, v in records.items() if k.startswith(prefix + "/")}
    assert out, f"no records for {prefix}"
    return out


def _verdict(number, title, ok, detail):
    ACCEPTANCE_LINES[number] = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail}"
    assert ok, detail


def test_criterion_01_moebius_involution(records):
    recs = _group(records, "moebius_involution")
    assert {r["inputs"]["n"] for r in recs.values()} == {1, 2, 5}
    invol = [r for k, r in recs.items() if k.endswith("involution")]
    centre = [r for k, r in recs.items() if k.endswith("centre")]
    assert sum(r["inputs"]["samples"] for r in invol) >= 1000
    worst_i = max(r["lhs"] for r in invol)
    worst_c = max(r["lhs"] for r in centre)
    ok = worst_i <= 1e-10 and worst_c <= 1e-12 and all(r["passed"] for r in recs.values())
    _verdict(1, "Moebius involution", ok, f"max error {worst_i:.2e} (<= 1e-10), centre {worst_c:.2e} (<= 1e-12)")


def test_criterion_02_differential_norm_split(records):
    recs = _group(records, "moebius_differential_norm")
    assert {r["inputs"]["n"] for r in recs.values()} == {1, 2, 3, 5}
    for r in recs.values():
        assert r["inputs"]["radii"] == pytest.approx([0, .1, .2, .3, .4, .5, .6, .7, .8, .9, .95])
    worst = max(r["lhs"] for r in recs.values())
    ok = worst <= 1e-8 and all(r["passed"] for r in recs.values())
    _verdict(2, "differential-norm split", ok, f"max deviation {worst:.2e} (<= 1e-8)")


def test_criterion_03_schwarz_pick_battery(records):
    recs = _group(records, "schwarz_pick_battery")
    pairs = {(r["inputs"]["n"], r["inputs"]["m"]) for r in recs.values()}
    assert pairs == {(n, m) for n in (1, 2) for m in (1, 2, 3)}
    assert all(r["inputs"]["maps"] == 200 for r in recs.values())
    # each record stores minus the worst slack
    worst = min(-r["lhs"] for r in recs.values())
    ok = worst >= -1e-9 and all(r["passed"] for r in recs.values())
    _verdict(3, "Schwarz-Pick battery", ok, f"worst slack {worst:.3e} over 6 x 200 maps (>= -1e-9)")


def test_criterion_04_quasi_hyperbolic_oracle(records):
    rec = records["quasi_hyperbolic_disk/radial"]
    assert rec["inputs"]["spacing"] == 1 / 512
    radii = rec["inputs"]["radii"]
    assert radii == [0.3, 0.6, 0.9]
    # recompute the relative errors from the stored grid values
    errs = [abs(g - math.log(1 / (1 - r))) / math.log(1 / (1 - r))
            for g, r in zip(rec["constants"]["grid_values"], radii)]
    worst = max(errs)
    ok = worst <= 0.02 and rec["passed"]
    _verdict(4, "quasi-hyperbolic disk oracle", ok, f"max relative error {worst:.2e} (<= 2%)")


def test_criterion_05_uniform_domain_lemma(records):
    arcs = records["uniform_domain_lemma/cone_arcs"]
    assert arcs["inputs"]["pairs"] == 1000 and arcs["rhs"] == 2.05
    worst_c = max(arcs["constants"]["c_i"], arcs["constants"]["c_ii"])
    ratios = {}
    for alpha in (0.25, 0.5, 0.75):
        r = records[f"uniform_domain_lemma/alpha={alpha}"]
        assert r["constants"]["M"] == pytest.approx(4 / alpha)
        assert r["inputs"]["pairs"] >= 1000
        ratios[alpha] = r["lhs"]
    ok = worst_c <= 2.05 and max(ratios.values()) <= 1.0 and arcs["passed"]
    _verdict(5, "uniform-domain lemma", ok,
             f"cone-arc constant {worst_c:.3f} (<= 2.05), worst integral ratio {max(ratios.values()):.3f} (<= 1)")


def test_criterion_06_hardy_littlewood(records):
    details, ok = [], True
    for alpha in (0.25, 0.5, 0.75):
        up = records[f"hardy_littlewood_disk/alpha={alpha},upper"]
        low = records[f"hardy_littlewood_disk/alpha={alpha},lower"]
        c_f, c_prime = up["constants"]["C_f"], up["constants"]["C_prime_f"]
        assert up["inputs"]["pairs"] == 10000
        # sampled C' <= (4/alpha) grid C, and grid C <= 1.05 sampled C'
        ok &= c_prime <= (4 / alpha) * c_f * (1 + 1e-12) and c_f <= 1.05 * c_prime
        ok &= up["passed"] and low["passed"]
        details.append(f"a={alpha}: C={c_f:.3f} C'={c_prime:.3f}")
    _verdict(6, "Hardy-Littlewood on the disk", ok, "; ".join(details))


def test_criterion_07_regularity_constants(records):
    k1 = records["regularity_constants/p=1"]
    k2 = records["regularity_constants/p=2"]
    assert k1["inputs"]["maps"] >= 10 and k2["inputs"]["maps"] >= 10
    ok1 = k1["lhs"] <= 1 + 1e-3
    ok2 = k2["lhs"] <= 1 + 1e-3
    detail = f"p=1 K={k1['lhs']:.4f}, p=2 K={k2['lhs']:.4f} (each <= 1.001)"
    if not ok1:
        detail += "; the scalar claim K=1 is false, see the decisions ledger"
    _verdict(7, "regularity constants", ok1 and ok2, detail)


def test_criterion_08_dyakonov_corollaries(records):
    details, ok = [], True
    for alpha in (0.4, 0.6):
        one = records[f"dyakonov_corollaries/dim1,alpha={alpha}"]
        many = records[f"dyakonov_corollaries/higher,alpha={alpha}"]
        assert one["constants"]["constant"] == pytest.approx(8 / alpha)
        assert many["constants"]["constant"] == pytest.approx(16 / alpha)
        assert one["inputs"]["c"] == 2.0
        for r in (one, many):
            assert r["constants"]["maps"] == 20 and r["bias"]["slack"] == 0.05
            ok &= r["passed"] and r["lhs"] <= r["rhs"]
        details.append(f"a={alpha}: {one['lhs']:.2f}/{one['rhs']:.2f}, {many['lhs']:.2f}/{many['rhs']:.2f}")
    _verdict(8, "Dyakonov corollaries", ok, "; ".join(details))


def test_criterion_09_triangle_remark(records):
    recs = _group(records, "triangle_remark")
    assert all(r["inputs"]["pairs"] >= 1000 for r in recs.values())
    worst = max(r["lhs"] for r in recs.values())
    ok = worst <= 1e-12 and all(r["passed"] for r in recs.values())
    _verdict(9, "triangle remark", ok, f"worst excess {worst:.2e} over {len(recs)} target sets (<= 1e-12)")


def test_criterion_10_frechet_bridge(records):
    rec = records["frechet_bridge/gap"]
    assert rec["inputs"]["points"] == 50 and rec["inputs"]["smallest_radius"] == 1e-4
    w = rec["witness"]
    assert abs(w["differential_norm"] - w["dilatation"]) == pytest.approx(rec["lhs"], abs=1e-15)
    ok = rec["lhs"] <= 1e-3 and rec["passed"]
    _verdict(10, "Frechet bridge", ok, f"max gap {rec['lhs']:.2e} (<= 1e-3)")


def test_criterion_11_determinism(runs):
    a, b = (report_json(r) for r in runs)
    ok = a == b
    _verdict(11, "determinism", ok, f"two default runs, {len(a)} bytes, identical={ok}")
