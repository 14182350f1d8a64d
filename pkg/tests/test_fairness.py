from fractions import Fraction

import numpy as np
import pytest

import fairdiv as fd

from _oracles import ef1_ok, eref_ok, quad_win_expectation


def _random_pairs(count, seed, n_max=4, m_max=6, e_max=9, total=30):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(2, n_max + 1))
        m = int(rng.integers(1, m_max + 1))
        inst = fd.generate_random(
            fd.GenConfig(n, m, e_max, total, int(rng.integers(2**63)))
        )
        owner = rng.integers(0, n, size=m)
        yield inst, fd.Allocation(owner)


def test_ef1_single_good_removal_empties_bundle():
    inst = fd.new_instance([[1], [1]], [1, 1])
    ok, witness = fd.is_ef1(inst, fd.Allocation([0]))
    assert ok and witness is None


def test_ef1_two_identical_goods_hoarded():
    inst = fd.new_instance([[1, 1], [1, 1]], [1, 1])
    ok, witness = fd.is_ef1(inst, fd.Allocation([0, 0]))
    assert not ok and witness == (1, 0)


def test_eref_all_goods_to_lowest_endowment():
    inst = fd.new_instance([[3, 4], [5, 6], [1, 1]], [2, 5, 9])
    ok, _ = fd.is_eref(inst, fd.Allocation([0, 0]))
    assert ok


def test_eref_equal_endowments_vacuous():
    inst = fd.new_instance([[9, 9], [9, 9]], [4, 4])
    ok, _ = fd.is_eref(inst, fd.Allocation([0, 0]))
    assert ok


def test_eref_violation_witness():
    inst = fd.new_instance([[0, 5], [1, 1]], [1, 2])
    ok, witness = fd.is_eref(inst, fd.Allocation([1, 1]))
    assert not ok and witness == (0, 1)
    # witness satisfies the definition exactly
    i, j = witness
    assert inst.endowments[i] < inst.endowments[j]


def test_checkers_agree_with_bruteforce():
    for inst, alloc in _random_pairs(150, seed=51):
        vals = inst.valuations.tolist()
        owner = alloc.owner.tolist()
        assert fd.is_ef1(inst, alloc)[0] == ef1_ok(vals, owner)
        assert fd.is_eref(inst, alloc)[0] == eref_ok(
            vals, inst.endowments.tolist(), owner
        )


def test_neither_criterion_implies_the_other():
    # EF1 but not EREF: the single good goes to the higher-endowed agent
    inst = fd.new_instance([[5], [5]], [1, 2])
    alloc = fd.Allocation([1])
    assert fd.is_ef1(inst, alloc)[0]
    assert not fd.is_eref(inst, alloc)[0]
    # EREF but not EF1: equal endowments make EREF vacuous, hoarding kills EF1
    inst2 = fd.new_instance([[1, 1], [1, 1]], [3, 3])
    alloc2 = fd.Allocation([0, 0])
    assert fd.is_eref(inst2, alloc2)[0]
    assert not fd.is_ef1(inst2, alloc2)[0]


def test_band_detection():
    inst = fd.new_instance([[0, 3], [7, 0]], [1, 1])
    assert fd.valuation_band(inst) == (3, 7)
    assert fd.valuation_band(fd.new_instance([[0]], [1])) is None
    assert fd.eref_guaranteed_pairs(fd.new_instance([[0]], [1])) == []


def test_guaranteed_pairs_inequality():
    # band ratio 1/2, endowments 1 vs 10: 1 < (1/2)*10 so the pair qualifies
    inst = fd.new_instance([[1, 2], [2, 1]], [1, 10])
    assert fd.eref_guaranteed_pairs(inst) == [(0, 1)]
    # boundary: e_i == (lo/hi) e_j is NOT strict, no guarantee
    inst2 = fd.new_instance([[1, 2], [2, 1]], [1, 2])
    assert fd.eref_guaranteed_pairs(inst2) == []


def test_binary_band_dec_solution_fully_eref():
    rng = np.random.default_rng(52)
    for _ in range(200):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, 7))
        vals = (rng.random((n, m)) < 0.6).astype(np.int64) * 7
        if not vals.any():
            continue
        ends = rng.integers(1, 50, size=n)
        inst = fd.new_instance(vals, ends)
        dec = fd.decentralized_solution(inst, tie_seed=int(rng.integers(2**63)))
        assert fd.is_eref(inst, dec)[0]


def test_guaranteed_pairs_hold_under_dec_solution():
    rng = np.random.default_rng(53)
    for _ in range(200):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, 6))
        # nonzero values confined to a band
        vals = rng.integers(4, 9, size=(n, m)) * (rng.random((n, m)) < 0.7)
        ends = rng.integers(1, 60, size=n)
        inst = fd.new_instance(vals.astype(np.int64), ends)
        dec = fd.decentralized_solution(inst, tie_seed=int(rng.integers(2**63)))
        rep = fd.fairness_report(inst, dec)
        assert all(rep.guaranteed_pairs_hold)


def test_fairness_report_consistency():
    inst = fd.new_instance([[5], [5]], [1, 2])
    rep = fd.fairness_report(inst, fd.Allocation([1]))
    assert rep.ef1 and not rep.eref
    assert rep.eref_witness == (0, 1)
    assert rep.band == (5, 5)


def test_mcconfig_validation():
    with pytest.raises(ValueError):
        fd.MCConfig((1, 2), (1.0,), trials=0)
    with pytest.raises(ValueError):
        fd.MCConfig((0, 2), (1.0,), trials=10)
    with pytest.raises(ValueError):
        fd.MCConfig((1, 2), (0.0,), trials=10)


def test_mc_orientation_errors():
    cfg = fd.MCConfig((1, 2), (1.0,), trials=10, seed=0)
    with pytest.raises(ValueError, match="orientation"):
        fd.mc_eref_expectation(cfg, 1, 0)
    with pytest.raises(ValueError, match="orientation"):
        fd.mc_eref_probability(cfg, 1, 0)


def test_mc_reproducible_and_se_shrinks():
    small = fd.MCConfig((1, 2, 4), (1.0, 2.0), trials=1000, seed=9)
    rep1 = fd.mc_eref_expectation(small, 0, 2)
    rep2 = fd.mc_eref_expectation(small, 0, 2)
    assert rep1 == rep2
    big = fd.MCConfig((1, 2, 4), (1.0, 2.0), trials=16000, seed=9)
    rep3 = fd.mc_eref_expectation(big, 0, 2)
    # stderr scales like 1/sqrt(trials): 16x trials ~ 4x smaller
    assert rep3.se_own < rep1.se_own / 2.5


def test_mc_equal_endowments_symmetric():
    # with equal endowments the agents are exchangeable, so the two agents'
    # own-bundle expectations coincide (1/3 analytically for two U[0,1] draws)
    cfg = fd.MCConfig((3, 3), (1.0,), trials=40000, seed=10)
    rep01 = fd.mc_eref_expectation(cfg, 0, 1)
    cfg2 = fd.MCConfig((3, 3), (1.0,), trials=40000, seed=77)
    rep10 = fd.mc_eref_expectation(cfg2, 1, 0)
    assert abs(rep01.mean_own - rep10.mean_own) <= 3 * (rep01.se_own + rep10.se_own)
    assert rep01.mean_own == pytest.approx(1 / 3, abs=0.01)
    assert rep01.status_plain == "holds"


def test_mc_expectation_matches_quadrature_oracle():
    cfg = fd.MCConfig((1, 2), (1.0,), trials=60000, seed=11)
    rep = fd.mc_eref_expectation(cfg, 0, 1)
    own_expected, other_expected = quad_win_expectation(1, 2, grid=2000)
    assert abs(rep.mean_own - own_expected) <= 3 * max(rep.se_own, 1e-9)
    assert abs(rep.mean_other - other_expected) <= 3 * max(rep.se_other, 1e-9)
    assert rep.status_plain == "holds" and rep.status_scaled == "holds"


def test_probability_bound_formula_values():
    assert fd.eref_probability_bound((1, 2), 1, 1) == Fraction(3, 4)
    assert fd.eref_probability_bound((1, 2, 3), 4, 2) == Fraction(390625, 531441)
    # huge top endowment drives the bound to 1
    big = fd.eref_probability_bound((1, 1, 10**6), 3, 2)
    assert float(big) > 0.9999


def test_mc_probability_extreme_endowment():
    cfg = fd.MCConfig((1, 1, 10**6), (1.0, 1.0), trials=4000, seed=12)
    rep = fd.mc_eref_probability(cfg, 0, 2)
    assert rep.p_hat == pytest.approx(1.0, abs=1e-3)
    assert rep.status == "holds"


def test_mc_probability_reports_bound_and_status():
    cfg = fd.MCConfig((1, 2, 3), (1.0, 1.0, 1.0, 1.0), trials=20000, seed=13)
    rep = fd.mc_eref_probability(cfg, 0, 2)
    assert rep.bound == pytest.approx(float(Fraction(390625, 531441)))
    assert rep.p_hat >= rep.bound - fd.fairness.Z99 * rep.se
    assert rep.status in ("holds", "inconclusive")
