"""Acceptance suite: one test per guarantee, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.  Every comparison is exact rational arithmetic; a single
exception anywhere fails the criterion.
"""

import math
import random
import time
from fractions import Fraction as F

import pytest

from ckpsolve import (BoxBid, GridPoint, Instance, MultiMindedBid,
                      SingleMindedBid, SubSumSpec, box_bid_from_complex,
                      build_range, ckp_bifptas, closure_value, cx, gen_random,
                      gen_subsum_reduction, grid_unit, multi_mdkp_ptas,
                      multi_two_dkp_exact, multickp_fptas, projection_grids,
                      round_demand, rounded_demand_space, two_dkp_exact)
from ckpsolve.audit import random_fake
from ckpsolve.mechanism import mechanism_outcome, misreport_trial
from ckpsolve.oracle import (brute_force_ckp, brute_force_exact_fit,
                             brute_force_multi)


def report(k, name, ok, detail, elapsed, budget):
    verdict = "PASS" if ok else "FAIL"
    line = (f"ACCEPTANCE {k} ({name}): {verdict} - {detail} "
            f"[{elapsed:.1f}s < {budget}s]")
    print(line, flush=True)
    assert ok, line
    assert elapsed < budget, line


def single_minded_corpus(count=200):
    out = []
    for i in range(count):
        rng = random.Random(1000 + i)
        n = rng.randint(2, 10)
        P = rng.choice([1, 2, 4])
        mix = rng.choice([0, F(1, 4), F(1, 2)])
        out.append(gen_random(n, 1, mix, seed=2000 + i, power_factor=P))
    return out


def multi_minded_corpus(count=100):
    out = []
    for i in range(count):
        rng = random.Random(5000 + i)
        n = rng.randint(2, 6)
        oc = rng.randint(2, 3)
        P = rng.choice([1, 2])
        mix = rng.choice([0, F(1, 3), F(1, 2)])
        out.append(gen_random(n, oc, mix, seed=6000 + i, power_factor=P))
    return out


def test_criterion_1_bifptas_guarantee():
    t0 = time.perf_counter()
    corpus = single_minded_corpus(200)
    exceptions = 0
    runs = 0
    for inst in corpus:
        opt = brute_force_ckp(inst).opt_value
        for eps in (F(1, 4), F(1, 2)):
            res = ckp_bifptas(inst, eps)
            runs += 1
            if res.allocation.total_value < opt:
                exceptions += 1
            lhs = res.allocation.total_load.magnitude_sq()
            if lhs > ((1 + 3 * eps) * inst.capacity) ** 2:
                exceptions += 1
    elapsed = time.perf_counter() - t0
    report(1, "bi-criteria single-minded", exceptions == 0,
           f"{len(corpus)} instances, {runs} runs, {exceptions} exceptions",
           elapsed, 120)


def test_criterion_2_multifptas_guarantee():
    t0 = time.perf_counter()
    corpus = multi_minded_corpus(100)
    exceptions = 0
    runs = 0
    for inst in corpus:
        opt = brute_force_multi(inst).opt_value
        for eps in (F(1, 4), F(1, 2)):
            res = multickp_fptas(inst, eps)
            runs += 1
            if res.allocation.total_value < opt:
                exceptions += 1
            lhs = res.allocation.total_load.magnitude_sq()
            if lhs > ((1 + 4 * eps) * inst.capacity) ** 2:
                exceptions += 1
    elapsed = time.perf_counter() - t0
    report(2, "bi-criteria multi-minded", exceptions == 0,
           f"{len(corpus)} instances, {runs} runs, {exceptions} exceptions",
           elapsed, 180)


def test_criterion_3_dp_exactness():
    t0 = time.perf_counter()
    cfg = grid_unit(16, 8, 1, 1)  # L = 1
    dhat = rounded_demand_space(projection_grids(cfg))
    disagreements = 0
    grids_checked = 0
    for seed in range(50):
        rng = random.Random(seed)
        count = rng.randint(4, 10)
        items = []
        while len(items) < count:
            cell = GridPoint(rng.randint(0, 8), rng.randint(0, 8))
            if cell == (0, 0):
                continue  # a free-value item is not expressible as a bid
            items.append((F(rng.randint(0, 20), rng.choice([1, 2, 4])), cell))
        bids = [MultiMindedBid([(cx(cell.re_idx, cell.im_idx), v)])
                for v, cell in items]
        grids_checked += 1
        for c1 in range(9):
            for c2 in range(9):
                want = brute_force_exact_fit(items, c1, c2)
                got = two_dkp_exact(items, c1, c2)
                if (got is None) != (want is None):
                    disagreements += 1
                    continue
                if got is not None:
                    v = sum((items[i][0] for i in got), F(0))
                    if v != want[0]:
                        disagreements += 1
                asg = multi_two_dkp_exact(bids, c1, c2, dhat, cfg)
                if (asg is None) != (want is None):
                    disagreements += 1
                    continue
                if asg is not None:
                    v = sum((closure_value(bids[u],
                                           cx(cell.re_idx, cell.im_idx))
                             for u, cell in asg.items()), F(0))
                    if v != want[0]:
                        disagreements += 1
    elapsed = time.perf_counter() - t0
    report(3, "exact-fit DP equivalence", disagreements == 0,
           f"{grids_checked} grids, all 81 targets each, "
           f"{disagreements} disagreements", elapsed, 60)


def test_criterion_4_ptas_guarantee():
    t0 = time.perf_counter()
    box = (F(1), F(1))
    exceptions = 0
    instances = 0
    for seed in range(50):
        rng = random.Random(7000 + seed)
        n = rng.randint(3, 7)
        cbids = []
        for _ in range(n):
            opts = []
            for _ in range(rng.randint(1, 2)):
                d = cx(F(rng.randint(0, 8), 8), F(rng.randint(0, 8), 8))
                if d.is_zero:
                    d = cx(F(1, 8), F(1, 8))
                opts.append((d, F(rng.randint(1, 20))))
            cbids.append(MultiMindedBid(opts))
        bids = [box_bid_from_complex(b) for b in cbids]
        inst = Instance(2, cbids, 1)
        opt = brute_force_multi(inst, box=box).opt_value
        instances += 1
        eps = F(1)  # heavy size t = ceil(m/eps) = 2
        res = multi_mdkp_ptas(bids, box, eps)
        if any(t > b for t, b in zip(res.total, box)):
            exceptions += 1
        if res.total_value < (1 - eps) * opt:
            exceptions += 1
        # tighter check at eps = 1/2 on the same instance
        res2 = multi_mdkp_ptas(bids, box, F(1, 2))
        if any(t > b for t, b in zip(res2.total, box)):
            exceptions += 1
        if res2.total_value < F(1, 2) * opt:
            exceptions += 1
    elapsed = time.perf_counter() - t0
    report(4, "box-constrained scheme, no violation", exceptions == 0,
           f"{instances} instances at eps in {{1, 1/2}}, "
           f"{exceptions} exceptions", elapsed, 120)


def test_criterion_5_truthfulness():
    t0 = time.perf_counter()
    eps = F(1, 2)
    violations = 0
    trials = 0
    hashes = set()
    for i in range(20):
        inst = gen_random(3, 2, F(1, 3) if i % 2 else 0, seed=8000 + i,
                          power_factor=1)
        rng_desc = build_range(inst.capacity, inst.n, eps,
                               inst.power_factor_bound)
        hashes.add(rng_desc.range_hash)
        bids = list(inst.bids)
        truth = mechanism_outcome(bids, rng_desc)
        # valuation perturbations never move the range hash
        perturbed = [MultiMindedBid([(d, v * 3) for d, v in
                                     b.as_multi().nonzero_options()])
                     if isinstance(b, SingleMindedBid) else
                     MultiMindedBid([(d, v * 3) for d, v in
                                     b.nonzero_options()])
                     for b in bids]
        rng_desc2 = build_range(inst.capacity, len(perturbed), eps,
                                inst.power_factor_bound)
        assert rng_desc2.range_hash == rng_desc.range_hash
        for t in range(25):
            rt = random.Random(9000 * (i + 1) + t)
            liar = rt.randrange(inst.n)
            fake = random_fake(rt, bids[liar], inst.capacity,
                               inst.power_factor_bound)
            u_truth, u_lie = misreport_trial(bids, liar, fake, rng_desc,
                                             truth_outcome=truth)
            trials += 1
            if u_lie > u_truth:
                violations += 1
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and len(hashes) == 1 and trials >= 500
    report(5, "truthfulness and range independence", ok,
           f"{trials} trials over 20 instances, {violations} utility gains, "
           f"{len(hashes)} distinct range hash(es)", elapsed, 300)


def _reachable_sums(elements):
    sums = {0}
    for a in elements:
        sums |= {s + a for s in sums}
    return sums


def _subsum_specs():
    feasible, infeasible = [], []
    seed = 0
    while len(feasible) < 10 or len(infeasible) < 10:
        seed += 1
        rng = random.Random(seed)
        m = rng.randint(3, 12)
        elements = sorted(rng.randint(1, 15) for _ in range(m))
        total = sum(elements)
        reach = _reachable_sums(elements)
        cot = rng.choice([1, 2])
        if len(feasible) < 10:
            b = rng.choice(sorted(s for s in reach
                                  if s >= max(elements) and s > 0))
            feasible.append((SubSumSpec(elements, b, cot, F(1, 2)), True))
            continue
        holes = [s for s in range(max(elements), total)
                 if s not in reach]
        if holes:
            b = rng.choice(holes)
            infeasible.append((SubSumSpec(elements, b, cot, F(1, 2)), False))
    return feasible + infeasible


def test_criterion_6_hardness_dichotomy():
    t0 = time.perf_counter()
    specs = _subsum_specs()
    assert len(specs) == 20
    failures = 0
    for spec, is_feasible in specs:
        inst = gen_subsum_reduction(spec)
        opt = brute_force_ckp(inst).opt_value
        if is_feasible:
            if opt < 1:
                failures += 1
            res = ckp_bifptas(inst, F(1, 2))
            if res.allocation.total_value < 1:
                failures += 1
        else:
            if opt >= spec.alpha:
                failures += 1
    elapsed = time.perf_counter() - t0
    report(6, "subset-sum dichotomy", failures == 0,
           f"10 feasible + 10 infeasible specs, {failures} failures",
           elapsed, 60)


def test_criterion_7_guess_count_bound():
    t0 = time.perf_counter()
    violations = 0
    runs = 0
    for i in range(40):
        rng = random.Random(300 + i)
        n = rng.randint(2, 8)
        P = rng.choice([1, 2, 4])
        oc = rng.choice([1, 2])
        inst = gen_random(n, oc, rng.choice([0, F(1, 3)]), seed=400 + i,
                          power_factor=P)
        eps = rng.choice([F(1, 4), F(1, 2)])
        res = (ckp_bifptas if oc == 1 else multickp_fptas)(inst, eps)
        runs += 1
        grids = projection_grids(res.grid)
        closed_form = ((math.ceil(res.grid.C * (1 + res.grid.P) / res.grid.L)
                        + 1)
                       * (math.ceil(res.grid.C * res.grid.P / res.grid.L) + 1)
                       * (math.ceil(res.grid.C / res.grid.L) + 1) ** 2)
        if res.stats.guesses_tried > closed_form:
            violations += 1
        if res.stats.guess_space_size != closed_form:
            violations += 1
        if grids.guess_space_size() != closed_form:
            violations += 1
    elapsed = time.perf_counter() - t0
    report(7, "guess-count bound", violations == 0,
           f"{runs} runs, counter within the closed-form product, "
           f"{violations} violations", elapsed, 60)


def test_criterion_8_rounding_soundness():
    t0 = time.perf_counter()
    corpus = single_minded_corpus(200)
    violations = 0
    subsets_checked = 0
    for inst in corpus:
        n = inst.n
        demands = [b.demand for b in inst.bids]
        den = 1
        for d in demands + [cx(inst.capacity, 0)]:
            for x in (d.re, d.im):
                den = den * x.denominator // math.gcd(den, x.denominator)
        re_i = [int(d.re * den) for d in demands]
        im_i = [int(d.im * den) for d in demands]
        cap_sq = (inst.capacity * den) ** 2
        for eps in (F(1, 4), F(1, 2)):
            cfg = grid_unit(inst.capacity, n, eps, inst.power_factor_bound)
            cells = [round_demand(d, cfg) for d in demands]
            r2 = ((1 + 2 * eps) * inst.capacity / cfg.L) ** 2
            num, dnm = r2.numerator, r2.denominator
            for mask in range(1 << n):
                r = s = a = b = 0
                for k in range(n):
                    if mask >> k & 1:
                        r += re_i[k]
                        s += im_i[k]
                        a += cells[k].re_idx
                        b += cells[k].im_idx
                if F(r * r + s * s) > cap_sq:
                    continue  # not a feasible witness
                subsets_checked += 1
                if (a * a + b * b) * dnm > num:
                    violations += 1
    elapsed = time.perf_counter() - t0
    report(8, "rounded feasible loads stay admissible", violations == 0,
           f"{subsets_checked} feasible subsets across {len(corpus)} "
           f"instances at two accuracies, {violations} violations",
           elapsed, 120)
