"""Acceptance criteria, one test and one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v`` (lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py`` for the bare verdicts.
"""
from __future__ import annotations

import random
import time
from fractions import Fraction

import numpy as np

import gen
from qtopos import linops
from qtopos.contexts import build_poset
from qtopos.dasein import inner_indices, inner_obs, interval_table, outer_indices, outer_obs
from qtopos.kscheck import brute_force_section, cabello18, find_global_section, verify_coloring_witness
from qtopos.linops import proj_join, proj_leq, proj_meet
from qtopos.logic import (
    CO,
    CONTRA,
    all_families,
    covariant_proposition,
    embed_inner,
    embed_outer,
    family_class,
    heyting_implies,
    heyting_not,
    is_valid,
)
from qtopos.outcomes import OutcomeSet, Segment
from qtopos.states import State, measure_contra, measure_covar, truth, truth_contra, truth_covar

EPS = 1e-9


def test_ks_negative(verdict):
    w = cabello18()
    start = time.perf_counter()
    coloring = verify_coloring_witness(w.basis_projections())
    poset = w.poset()
    section = find_global_section(poset)
    elapsed = time.perf_counter() - start
    ok = (
        coloring.no_coloring
        and coloring.nodes_explored <= 4**9
        and not section.found
        and elapsed < 5.0
        and poset.backend.exact
    )
    verdict(
        "1 KS negative (18 vectors, 9 bases, dim 4)",
        ok,
        f"no coloring after {coloring.nodes_explored} choices; no section on {len(poset)} contexts "
        f"after {section.nodes_explored} nodes; {elapsed:.2f}s exact",
    )
    assert ok


def test_ks_positive_control(verdict):
    rng = random.Random(2024)
    worst, count, ok = 0.0, 0, True
    for _ in range(25):
        seeds = gen.random_seeds(rng, 2, rng.randint(5, 8))
        poset = build_poset(seeds)
        start = time.perf_counter()
        res = find_global_section(poset)
        worst = max(worst, time.perf_counter() - start)
        ok &= len(poset) >= 6 and res.found and brute_force_section(poset) is not None
        count += 1
    ok &= worst < 1.0
    verdict("2 KS positive control (qubit fragments)", ok, f"{count} fragments sectioned, worst {worst * 1e3:.1f} ms")
    assert ok


def _brute_outer(p, ctx):
    """Smallest atom set whose sum lies above p (search over all 2^k subsets)."""
    best = None
    for idx, q in ctx.projections():
        if proj_leq(p, q) and (best is None or len(idx) < len(best)):
            best = idx
    return best


def _brute_inner(p, ctx):
    best = frozenset()
    for idx, q in ctx.projections():
        if proj_leq(q, p) and len(idx) > len(best):
            best = idx
    return best


def test_daseinisation_embedding(verdict):
    rng = random.Random(7)
    instances, strict_outer, strict_inner, failures = 0, 0, 0, []
    while instances < 500:
        n = rng.choice([2, 3, 4])
        poset = gen.random_poset(rng, n)
        p, q = gen.random_projection(rng, n), gen.random_projection(rng, n)
        floaty = instances % 10 == 0
        if floaty:
            fposet = gen.float_poset(poset)
        join, meet = proj_join(p, q), proj_meet(p, q)
        zero, one = linops.EXACT.zeros(n), linops.EXACT.identity(n)
        for ctx in poset.contexts:
            everything = frozenset(range(ctx.k))
            op, oq = outer_indices(p, ctx), outer_indices(q, ctx)
            ip, iq = inner_indices(p, ctx), inner_indices(q, ctx)
            checks = [
                outer_indices(zero, ctx) == frozenset(),
                outer_indices(one, ctx) == everything,
                outer_indices(join, ctx) == op | oq,
                outer_indices(meet, ctx) <= op & oq,
                inner_indices(zero, ctx) == frozenset(),
                inner_indices(one, ctx) == everything,
                inner_indices(meet, ctx) == ip & iq,
                inner_indices(join, ctx) >= ip | iq,
                op == _brute_outer(p, ctx),
                ip == _brute_inner(p, ctx),
                proj_leq(p, ctx.atom_sum(op)),
                proj_leq(ctx.atom_sum(ip), p),
            ]
            strict_outer += outer_indices(meet, ctx) < op & oq
            strict_inner += inner_indices(join, ctx) > ip | iq
            if not all(checks):
                failures.append((instances, ctx.name, checks))
        for fam in (embed_outer(p, poset), embed_inner(p, poset)):
            if not is_valid(fam):
                failures.append((instances, "valid", fam))
        if floaty:
            fp = linops.to_float(p)
            got = [(outer_indices(fp, c), inner_indices(fp, c)) for c in fposet.contexts]
            want = [(outer_indices(p, c), inner_indices(p, c)) for c in poset.contexts]
            if got != want:
                failures.append((instances, "float", got, want))
        instances += 1
    # Boolean isomorphism of the restriction to one context's projection lattice
    iso_ok = True
    for _ in range(40):
        n = rng.choice([2, 3, 4])
        poset = gen.random_poset(rng, n)
        for ctx in poset.contexts:
            for idx, q in ctx.projections():
                iso_ok &= outer_indices(q, ctx) == idx and inner_indices(q, ctx) == idx
    ok = not failures and iso_ok and strict_outer > 0 and strict_inner > 0
    verdict(
        "3 daseinisation embedding",
        ok,
        f"{instances} instances, {len(failures)} failures, strict meet cases {strict_outer}, "
        f"strict join cases {strict_inner}, Boolean iso {'ok' if iso_ok else 'broken'}",
    )
    assert ok, failures[:3]


def test_heyting_suite(verdict):
    poset = gen.qubit_poset()
    triples = 0
    ok = True
    for variance in (CONTRA, CO):
        fams = list(all_families(poset, variance))
        for s in fams:
            for t in fams:
                imp = heyting_implies(s, t)
                ok &= is_valid(imp)
                for u in fams:
                    ok &= (u <= imp) == ((u & s) <= t)
                    triples += 1
    # excluded middle fails on the stored instance, in both pictures
    p0 = linops.exact_matrix([[1, 0], [0, 0]])
    s_co = embed_inner(p0, poset)
    neg_co = heyting_not(s_co)
    em_co = s_co | neg_co
    s_contra = embed_outer(p0, poset)
    em_contra = s_contra | heyting_not(s_contra)
    stored = (
        neg_co.sections == (frozenset(), frozenset({1}), frozenset({0, 1}))
        and em_co != family_class(CO).top(poset)
        and em_contra != family_class(CONTRA).top(poset)
    )
    rng = random.Random(11)
    dist = 0
    for _ in range(520):
        fposet = gen.random_poset(rng, rng.choice([2, 3]))
        variance = rng.choice([CONTRA, CO])
        s, t, u = (gen.random_family(rng, fposet, variance) for _ in range(3))
        ok &= (s & (t | u)) == ((s & t) | (s & u))
        ok &= (s | (t & u)) == ((s | t) & (s | u))
        dist += 1
    ok &= stored
    verdict(
        "4 Heyting suite",
        ok,
        f"{triples} adjunction triples exhaustive, excluded middle fails on stored instance, "
        f"{dist} distributive triples",
    )
    assert ok


def _close(x, y, exact):
    return x == y if exact else abs(float(x) - float(y)) <= 1e-8


def test_state_measures(verdict):
    rng = random.Random(5)
    count, bad = 0, 0
    while count < 500:
        n = rng.choice([2, 3, 4])
        poset = gen.random_poset(rng, n)
        state = gen.random_state(rng, n)
        exact = count % 4 != 0
        if not exact:
            fposet = gen.float_poset(poset)
            state = State(linops.to_float(state.rho))
        target = poset if exact else fposet
        variance = rng.choice([CONTRA, CO])
        measure = measure_contra if variance == CONTRA else measure_covar
        cls = family_class(variance)
        s1, s2 = gen.random_family(rng, target, variance), gen.random_family(rng, target, variance)
        m1, m2 = measure(state, s1), measure(state, s2)
        mm, mj = measure(state, s1 & s2), measure(state, s1 | s2)
        mt = measure(state, cls.top(target))
        for i, ctx in enumerate(target.contexts):
            local = gen.close_family(
                cls(target, [s1.sections[i] if j == i else () for j in range(len(target))]), variance
            )
            good = (
                _close(m1.values[i] + m2.values[i], mm.values[i] + mj.values[i], exact)
                and _close(mt.values[i], 1, exact)
                and _close(measure(state, local).values[i], m1.values[i], exact)
            )
            bad += not good
        count += 1
    ok = bad == 0
    verdict("5 state/measure suite", ok, f"{count} instances, {bad} context failures")
    assert ok


def test_truth_variance(verdict):
    rng = random.Random(9)
    count, bad, nontrivial = 0, 0, 0
    while count < 500:
        n = rng.choice([2, 3, 4])
        poset = gen.random_poset(rng, n)
        p = gen.random_projection(rng, n)
        support = p if rng.random() < 0.5 and linops.proj_rank(p) > 0 else None
        state = gen.random_state(rng, n, support=support)
        tc, tv = truth_contra(state, p, poset), truth_covar(state, p, poset)
        good = poset.is_downset(tc.members) and poset.is_upset(tv.members)
        if tv.members:
            good &= tc.is_full()
            nontrivial += 1
        bad += not good
        count += 1

    qubit = gen.qubit_poset()
    ket = linops.exact_matrix
    p0, p1 = ket([[1, 0], [0, 0]]), ket([[0, 0], [0, 1]])
    pplus = ket([["1/2", "1/2"], ["1/2", "1/2"]])
    plus, zero = State(pplus), State(p0)
    # contravariant: truth of a join is not the join of truths
    join_fail = truth_contra(plus, proj_join(p0, p1), qubit).members != (
        truth_contra(plus, p0, qubit).members | truth_contra(plus, p1, qubit).members
    )
    # contravariant: truth of a meet is not the meet of truths
    meet_fail = truth_contra(zero, proj_meet(p0, pplus), qubit).members != (
        truth_contra(zero, p0, qubit).members & truth_contra(zero, pplus, qubit).members
    )
    co_fail = truth_covar(plus, proj_join(p0, p1), qubit).members != (
        truth_covar(plus, p0, qubit).members | truth_covar(plus, p1, qubit).members
    )
    ok = bad == 0 and join_fail and meet_fail and co_fail
    verdict(
        "6 truth-value variance",
        ok,
        f"{count} instances ({nontrivial} with covariant truth), {bad} failures; stored non-homomorphism "
        f"instances contra join={join_fail} contra meet={meet_fail} co join={co_fail}",
    )
    assert ok


def _random_open_interval(rng):
    lo = None if rng.random() < 0.15 else rng.randint(-4, 3) + rng.choice([0, 0.5])
    hi = None if rng.random() < 0.15 else (lo if lo is not None else -4) + rng.randint(1, 5) + rng.choice([0, 0.5])
    return OutcomeSet([Segment(lo, hi)])


def test_bn_covariant_equivalence(verdict):
    rng = random.Random(13)
    count, bad, hits = 0, 0, 0
    while count < 220:
        n = rng.choice([2, 3])
        poset = gen.random_poset(rng, n)
        a = gen.random_hermitian(rng, n)
        delta = _random_open_interval(rng)
        bn = linops.spectral_projection(a, delta)
        state = gen.random_state(rng, n, support=bn if rng.random() < 0.5 and linops.proj_rank(bn) else None)
        cov = covariant_proposition(a, delta, poset)
        bn_report, _ = truth(state, bn, poset, CO)
        cov_report = measure_covar(state, cov)
        i = rng.randrange(len(poset))
        ctx = poset.contexts[i]
        left = bn_report.values[i] == 1
        right = cov_report.values[i] == 1
        same_set = cov.sections[i] == inner_indices(bn, ctx)
        bad += (left != right) or not same_set
        hits += left
        count += 1
    # float backend, same tolerance band
    for _ in range(30):
        n = rng.choice([2, 3])
        poset = gen.random_poset(rng, n)
        fposet = gen.float_poset(poset)
        a = linops.to_float(gen.random_hermitian(rng, n))
        delta = _random_open_interval(rng)
        bn = linops.spectral_projection(a, delta)
        state = State(linops.to_float(gen.random_state(rng, n).rho))
        bn_report, _ = truth(state, bn, fposet, CO)
        cov_report = measure_covar(state, covariant_proposition(a, delta, fposet))
        for x, y in zip(bn_report.values, cov_report.values):
            bad += (abs(x - 1) <= 1e-8) != (abs(y - 1) <= 1e-8)
        count += 1
    ok = bad == 0
    verdict("7 BN/covariant equivalence (open intervals)", ok, f"{count} instances, {hits} value-1 cases, {bad} disagreements")
    assert ok


def _qubit_regression(exact):
    """Every quantity the qubit examples exercise, as a flat list of floats."""
    poset = gen.qubit_poset(exact)
    make = linops.exact_matrix if exact else linops.float_matrix
    half = Fraction(1, 2)
    ops = {
        "sz": make([[1, 0], [0, -1]]),
        "sx": make([[0, 1], [1, 0]]),
        "sy": make([[0, -1j], [1j, 0]]),
        "n": make([[2, 1], [1, 2]]),
    }
    projs = {
        "p0": make([[1, 0], [0, 0]]),
        "p1": make([[0, 0], [0, 1]]),
        "pp": make([[half, half], [half, half]]),
        "pm": make([[half, -half], [-half, half]]),
    }
    states = [State(projs["p0"]), State(projs["pp"]), State(make([[half, 0], [0, half]]))]
    out: list[float] = []
    for name in ops:
        a = ops[name]
        for ctx in poset.contexts:
            out += [float(np.real(x)) for x in linops.to_float(outer_obs(a, ctx)).ravel()]
            out += [float(np.real(x)) for x in linops.to_float(inner_obs(a, ctx)).ravel()]
            for iv in interval_table(a, ctx):
                out += [float(iv.lo), float(iv.hi)]
        for d in ("(0,2)", "(-2,0)", "(-inf,inf)"):
            cov = covariant_proposition(a, OutcomeSet.parse(d), poset)
            out += [float(len(s)) for s in cov.sections]
    for p in projs.values():
        for variance in (CONTRA, CO):
            embed = embed_outer if variance == CONTRA else embed_inner
            fam = embed(p, poset)
            out += [float(len(s)) for s in fam.sections]
            out += [float(len(s)) for s in heyting_not(fam).sections]
            for st in states:
                report, tv = truth(st, p, poset, variance)
                out += [float(v) for v in report.values]
                out.append(float(len(tv.members)))
    for st in states:
        for a in ops.values():
            out += [float(x) for x in linops.spectrum(a)]
            out.append(float(np.real(np.trace(linops.to_float(st.rho) @ linops.to_float(a)))))
    return out


def test_backends_and_roundtrip(verdict):
    exact_vals, float_vals = _qubit_regression(True), _qubit_regression(False)
    agree = len(exact_vals) == len(float_vals) and max(abs(a - b) for a, b in zip(exact_vals, float_vals)) <= 1e-9
    rng = np.random.default_rng(17)
    worst = 0.0
    for i in range(520):
        n = int(rng.integers(1, 9))
        h = gen.random_float_hermitian(rng, n, degenerate=i % 3 == 0)
        back = linops.operator_from_family(linops.spectral_family(h))
        worst = max(worst, float(np.max(np.abs(back - h))))
    exact_rng = random.Random(3)
    exact_ok = True
    for _ in range(40):
        h = gen.random_hermitian(exact_rng, exact_rng.choice([2, 3, 4]))
        exact_ok &= linops.EXACT.eq(linops.operator_from_family(linops.spectral_family(h)), h)
    ok = agree and worst <= 10 * EPS and exact_ok
    verdict(
        "8 numeric backends",
        ok,
        f"{len(exact_vals)} qubit quantities agree={agree}; round-trip worst {worst:.2e} over 520 floats "
        f"(bound {10 * EPS:.0e}); exact round-trip {'exact' if exact_ok else 'broken'}",
    )
    assert ok


if __name__ == "__main__":
    def _print(label, ok, detail=""):
        print(f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else ""))
        return ok

    for fn in (
        test_ks_negative,
        test_ks_positive_control,
        test_daseinisation_embedding,
        test_heyting_suite,
        test_state_measures,
        test_truth_variance,
        test_bn_covariant_equivalence,
        test_backends_and_roundtrip,
    ):
        try:
            fn(_print)
        except AssertionError:
            pass
