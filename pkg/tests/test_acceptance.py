"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s or -rA to see them).

Criterion 1 is expected to fail on two cells: the analytic frequency-
estimator risk at n = 15 and n = 50 is 52.8665e-3 and 15.8600e-3, while the
reference table prints 52.8 and 15.8 with a +/-0.05e-3 gate.  No
implementation of the closed form can land inside that gate; see the
package docs.  Criterion 3 carries known residual deviations at n <= 25
for the binomial kernel, also documented there.
"""

import time

import numpy as np
import pytest

from dks import estimation as E
from dks import kernels as K
from dks import reproduce as REP
from dks import risk as R

B, P, NB, D = K.binomial(), K.poisson(), K.negbin(), K.dirac()
T1 = K.triangular(1)
F2 = R.PoissonPmf(2.0)


def report(criterion, ok, detail=""):
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


@pytest.fixture(scope="module")
def table23_study():
    start = time.time()
    study = REP.run_table23_study(REP.DEFAULT_SEED)
    study.elapsed = time.time() - start
    return study


def test_criterion_1_frequency_mise_analytic():
    start = time.time()
    reference = {15: 52.8e-3, 25: 31.7e-3, 50: 15.8e-3, 75: 10.6e-3, 100: 7.9e-3}
    failures = []
    for n, ref in reference.items():
        got = R.frequency_mise(F2, n)
        if abs(got - ref) > 0.05e-3:
            failures.append(f"n={n}: {got:.6f} vs {ref:.4f} (|diff|={abs(got - ref):.2e})")
    elapsed = time.time() - start
    ok = not failures and elapsed < 1.0
    report(1, ok, f"({len(reference) - len(failures)}/5 cells, {elapsed:.2f}s)")
    assert elapsed < 1.0
    assert not failures, "; ".join(failures)


def test_criterion_2_table1_reproduction():
    start = time.time()
    rows = REP.run_table1(REP.DEFAULT_SEED)
    elapsed = time.time() - start
    problems = []
    for row in rows:
        if not row["kernel_mean_ise"] < row["frequency_mean_ise"]:
            problems.append(f"n={row['n']}: kernel not better than frequency")
        if abs(row["kernel_rel_err"]) > 0.25:
            problems.append(f"n={row['n']}: kernel ISE off by {row['kernel_rel_err']:+.0%}")
        if abs(row["frequency_rel_err"]) > 0.25:
            problems.append(f"n={row['n']}: frequency ISE off by {row['frequency_rel_err']:+.0%}")
    ok = not problems and elapsed < 120.0
    report(2, ok, f"({elapsed:.1f}s)")
    assert elapsed < 120.0, f"table 1 took {elapsed:.1f}s"
    assert not problems, "; ".join(problems)


def test_criterion_3_table3_reproduction(table23_study):
    rows = REP.table3_rows(table23_study)
    cell_failures = [
        f"{r['kernel']}/n={r['n']}: {r['mise_x1000']:.1f} vs {r['reference_mise_x1000']} ({r['rel_err']:+.0%})"
        for r in rows
        if abs(r["rel_err"]) > 0.20
    ]
    mise = {(r["kernel"], r["n"]): r["mise_x1000"] for r in rows}
    qualitative = []
    if not mise[("negbin", 15)] < mise[("binomial", 15)]:
        qualitative.append("negbin does not beat binomial at n=15")
    for n in (15, 25):
        p = mise[("poisson", n)]
        if not (p < mise[("binomial", n)] and p < mise[("negbin", n)]):
            qualitative.append(f"poisson not best standard kernel at n={n}")
    for n in (50, 75, 100):
        b = mise[("binomial", n)]
        if not (b < mise[("poisson", n)] and b < mise[("negbin", n)]):
            qualitative.append(f"binomial not best standard kernel at n={n}")
    for n in (15, 25, 50, 75, 100):
        t = mise[("triangular(p=1)", n)]
        others = [mise[(k, n)] for k in ("dirac", "negbin", "poisson", "binomial")]
        if not all(t < o for o in others):
            qualitative.append(f"triangular not smallest at n={n}")
    problems = cell_failures + qualitative
    ok = not problems and table23_study.elapsed < 600.0
    report(3, ok, f"({25 - len(cell_failures)}/25 cells, {len(qualitative)} qualitative misses, "
                  f"{table23_study.elapsed:.0f}s)")
    assert table23_study.elapsed < 600.0
    assert not problems, "; ".join(problems)


def test_criterion_4_table2_trends(table23_study):
    rows = REP.table2_rows(table23_study)
    h_mean = {(r["kernel"], r["n"]): r["h_mean"] for r in rows}
    rel = {(r["kernel"], r["n"]): r["rel_err_mean"] for r in rows}
    problems = []
    for kernel in ("negbin", "poisson", "binomial"):
        seq = [h_mean[(kernel, n)] for n in (15, 25, 50, 75, 100)]
        if not all(seq[i] > seq[i + 1] for i in range(len(seq) - 1)):
            problems.append(f"{kernel}: mean h_cv not decreasing in n ({seq})")
    for n in (50, 75, 100):
        if not h_mean[("binomial", n)] < h_mean[("poisson", n)] < h_mean[("negbin", n)]:
            problems.append(f"n={n}: kernel ordering of mean h_cv broken")
        for kernel in ("negbin", "poisson", "binomial"):
            if abs(rel[(kernel, n)]) > 0.30:
                problems.append(f"{kernel}/n={n}: mean h_cv off by {rel[(kernel, n)]:+.0%}")
    ok = not problems
    report(4, ok)
    assert not problems, "; ".join(problems)


def test_criterion_5_table5_reproduction():
    start = time.time()
    rows = REP.table5_rows()
    elapsed = time.time() - start
    problems = []
    for r in rows:
        diff = abs(r["ise_at_reference_h"] - r["reference_ise"])
        rel = abs(r["rel_err"])
        if not (rel <= 0.10 or diff <= 0.002):
            problems.append(f"{r['dataset']}/{r['kernel']}: {r['ise_at_reference_h']:.4f} vs {r['reference_ise']}")
    winners = {r["dataset"]: r["kernel"] for r in rows if r["own_winner"]}
    if winners.get("safou") != "triangular(p=1)":
        problems.append(f"safou winner is {winners.get('safou')}")
    if winners.get("hura") != "binomial":
        problems.append(f"hura winner is {winners.get('hura')}")
    ok = not problems and elapsed < 30.0
    report(5, ok, f"({elapsed:.1f}s)")
    assert elapsed < 30.0
    assert not problems, "; ".join(problems)


def test_criterion_6_modal_and_variance_rankings():
    start = time.time()
    problems = []
    for x in range(1, 21):
        for h in (0.01, 0.05, 0.1, 0.2):
            if not (
                K.modal_probability(NB, x, h)
                <= K.modal_probability(P, x, h)
                <= K.modal_probability(B, x, h)
            ):
                problems.append(f"modal ranking broken at x={x}, h={h}")
    for x in range(0, 21):
        for h in [round(0.1 * k, 1) for k in range(1, 11)]:
            if not (
                K.kernel_variance(NB, x, h)
                >= K.kernel_variance(P, x, h)
                >= K.kernel_variance(B, x, h)
            ):
                problems.append(f"variance ranking broken at x={x}, h={h}")
    for ratio in (K.modal_limit_ratio_poisson_binomial, K.modal_limit_ratio_negbin_poisson):
        seq = [ratio(x) for x in range(0, 51)]
        if abs(seq[0] - 1.0) > 1e-12:
            problems.append(f"{ratio.__name__}(0) != 1")
        if any(seq[i + 1] > seq[i] + 1e-12 for i in range(len(seq) - 1)):
            problems.append(f"{ratio.__name__} not non-increasing")
        if any(v > 1.0 + 1e-12 for v in seq):
            problems.append(f"{ratio.__name__} exceeds 1")
    elapsed = time.time() - start
    ok = not problems and elapsed < 1.0
    report(6, ok, f"({elapsed:.2f}s)")
    assert elapsed < 1.0
    assert not problems, "; ".join(problems)


def test_criterion_7_amise_ranking():
    problems = []
    for n in (25, 100):
        for h in (0.01, 0.05, 0.1):
            vals = [R.amise(k, h, F2, n) for k in (B, P, NB)]
            if not vals[0] <= vals[1] <= vals[2]:
                problems.append(f"amise ranking broken at n={n}, h={h}: {vals}")
    ok = not problems
    report(7, ok)
    assert not problems, "; ".join(problems)


def _naive_cv(values, kernel, h, x_hi):
    n = len(values)
    term1 = 0.0
    for x in range(0, x_hi + 1):
        fx = sum(K.kernel_pmf(kernel, x, h, v) for v in values) / n
        term1 += fx * fx
    term2 = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                term2 += K.kernel_pmf(kernel, values[i], h, values[j])
    return term1 - 2.0 * term2 / (n * (n - 1))


def test_criterion_8_oracle_equivalence():
    start = time.time()
    problems = []

    # grouped CV equals the naive double loop on 100 random samples
    rng = np.random.default_rng(20240817)
    kernels = [(B, 1.0), (P, 5.0), (NB, 5.0), (T1, 10.0)]
    for trial in range(100):
        kernel, h_hi = kernels[trial % len(kernels)]
        n = int(rng.integers(2, 31))
        values = rng.poisson(rng.uniform(0.5, 6.0), n).tolist()
        h = float(rng.uniform(0.01, 1.0) * (1.0 if kernel is B else h_hi / 5.0))
        sample = E.Sample.from_values(values)
        got = E.cv_score(sample, kernel, h)
        want = _naive_cv(values, kernel, h, E.default_eval_hi(sample) + 80)
        if abs(got - want) > 1e-12:
            problems.append(f"cv mismatch on trial {trial}: {got} vs {want}")

    # closed-form moments versus numeric sums
    for kernel in (B, P, NB, T1):
        for x in (0, 2, 9, 20):
            for h in (0.05, 0.4, 1.0):
                sup = K.kernel_support(kernel, x, h, 1e-14)
                ys = np.arange(sup.lo, sup.truncation_hi + 1)
                w = K.pmf_grid(kernel, [x], h, ys)[0]
                m1 = float(np.dot(ys, w))
                var = float(np.dot(ys.astype(float) ** 2, w)) - m1 * m1
                if abs(m1 - K.kernel_mean(kernel, x, h)) > 1e-10:
                    problems.append(f"mean mismatch {kernel.label} x={x} h={h}")
                if abs(var - K.kernel_variance(kernel, x, h)) > 1e-10:
                    problems.append(f"variance mismatch {kernel.label} x={x} h={h}")
                if not 1.0 - 2e-12 <= w.sum() <= 1.0 + 1e-12:
                    problems.append(f"mass not normalized {kernel.label} x={x} h={h}")

    # bias and variance decompositions
    for kernel in (B, P, NB, T1):
        for x in range(0, 11):
            h, n = 0.2, 25
            fx = float(F2.pmf(x))
            modal = K.modal_probability(kernel, x, h)
            lhs_b = R.exact_bias(kernel, h, F2, x, 1e-14)
            rhs_b = fx * (modal - 1.0) + R.bias_off_target(kernel, h, F2, x, 1e-14)
            if abs(lhs_b - rhs_b) > 1e-10:
                problems.append(f"bias identity {kernel.label} x={x}")
            lhs_v = R.exact_variance(kernel, h, F2, n, x, 1e-14)
            rhs_v = fx * modal**2 / n - fx**2 / n + R.variance_remainder(kernel, h, F2, n, x, 1e-14)
            if abs(lhs_v - rhs_v) > 1e-10:
                problems.append(f"variance identity {kernel.label} x={x}")

    elapsed = time.time() - start
    ok = not problems and elapsed < 30.0
    report(8, ok, f"({elapsed:.1f}s)")
    assert elapsed < 30.0
    assert not problems, "; ".join(problems)


def test_criterion_9_expansion_checks():
    problems = []
    # triangular linear term: error ratio to h^2 stays bounded
    for arm in (1, 2, 4):
        a, _ = K.triangular_small_h_coeffs(arm)
        kernel = K.triangular(arm)
        ratios = []
        for h in (1e-2, 1e-3, 1e-4):
            err = abs(K.modal_probability(kernel, 4, h) - (1.0 - 2.0 * h * a))
            ratios.append(err / (h * h))
        if not (ratios[1] <= ratios[0] * 1.2 + 1e-7 and ratios[2] <= ratios[1] * 1.2 + 1e-7):
            problems.append(f"triangular arm={arm} ratio grows: {ratios}")
    # standard-family quadratic collapse toward the modal limit
    for kernel in (B, P, NB):
        for x in (1, 3, 8):
            limit = K.modal_limit(kernel, x)
            ratios = []
            for h in (1e-2, 1e-3, 1e-4):
                err = abs(K.modal_probability(kernel, x, h) - (1.0 - h * h) * limit)
                ratios.append(err / (h * h))
            if not (ratios[1] <= ratios[0] * 1.2 + 1e-7 and ratios[2] <= ratios[1] * 1.2 + 1e-7):
                problems.append(f"{kernel.label} x={x} ratio grows: {ratios}")
    ok = not problems
    report(9, ok)
    assert not problems, "; ".join(problems)
