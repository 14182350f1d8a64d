import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fairdiv as fd

from _oracles import compositions


def test_new_instance_valid():
    inst = fd.new_instance([[1, 0], [80, 1]], [20, 10], scale=10)
    assert inst.n == 2 and inst.m == 2
    assert inst.valuations.tolist() == [[1, 0], [80, 1]]


def test_new_instance_distinct_errors():
    with pytest.raises(ValueError, match="dimension mismatch"):
        fd.new_instance([[1, 2]], [1, 1])
    with pytest.raises(ValueError, match="negative valuation"):
        fd.new_instance([[1, -2]], [1])
    with pytest.raises(ValueError, match="non-positive endowment"):
        fd.new_instance([[1, 2], [0, 1]], [0, 1])


def test_smallest_legal_instance():
    inst = fd.new_instance([[0]], [1])
    assert inst.n == inst.m == 1


def test_instance_arrays_frozen():
    inst = fd.new_instance([[1, 2]], [1])
    with pytest.raises(ValueError):
        inst.valuations[0, 0] = 5


def test_allocation_bundles_partition():
    alloc = fd.Allocation([0, 1, 0, 2])
    bundles = alloc.bundles(3)
    assert [b.tolist() for b in bundles] == [[0, 2], [1], [3]]
    flat = sorted(g for b in bundles for g in b.tolist())
    assert flat == [0, 1, 2, 3]


def test_allocation_owner_out_of_range():
    inst = fd.new_instance([[1, 1]], [1])
    with pytest.raises(ValueError, match="out of range"):
        fd.validate_allocation(inst, fd.Allocation([0, 1]))


def test_generate_random_rows_sum_and_range():
    cfg = fd.GenConfig(n=2, m=3, e_max=5, total_valuation=500, seed=42)
    inst = fd.generate_random(cfg)
    assert inst.valuations.sum(axis=1).tolist() == [500, 500]
    assert (1 <= inst.endowments).all() and (inst.endowments <= 5).all()


def test_generate_random_deterministic():
    cfg = fd.GenConfig(n=3, m=4, e_max=7, seed=99)
    assert fd.generate_random(cfg) == fd.generate_random(cfg)


def test_generate_random_degenerate():
    inst = fd.generate_random(fd.GenConfig(n=1, m=1, e_max=1, seed=5))
    assert inst.valuations.tolist() == [[500]]
    assert inst.endowments.tolist() == [1]


def test_composition_uniformity_chi_square():
    # 1e5 draws of the row sampler for total=3, m=2 against the brute-force
    # enumeration of all 4 compositions
    from scipy import stats

    support = list(compositions(3, 2))
    assert len(support) == 4
    rng = np.random.default_rng(2024)
    counts = {c: 0 for c in support}
    for _ in range(100_000):
        counts[tuple(fd.random_composition(3, 2, rng).tolist())] += 1
    observed = [counts[c] for c in support]
    p = stats.chisquare(observed).pvalue
    assert p > 0.001


def test_identical_goods_example_values():
    inst = fd.gen_identical_goods(3, 0.01)
    assert inst.scale == 100
    assert inst.valuations.tolist() == [[100] * 3] * 3
    assert inst.endowments.tolist() == [100, 101, 101]


def test_identical_goods_rejects_bad_args():
    with pytest.raises(ValueError):
        fd.gen_identical_goods(1, 0.01)
    with pytest.raises(ValueError):
        fd.gen_identical_goods(3, 0)


def test_two_good_skew_example_values():
    inst = fd.gen_two_good_skew(8, 0.1)
    assert inst.scale == 10
    assert inst.valuations.tolist() == [[1, 0], [80, 1]]
    assert inst.endowments.tolist() == [20, 10]


def test_two_good_skew_rejects_bad_args():
    with pytest.raises(ValueError):
        fd.gen_two_good_skew(0.1, 0.1)
    with pytest.raises(ValueError):
        fd.gen_two_good_skew(0.05, 0.1)


def test_chain_family_exact_ratio_and_sparsity():
    from fairdiv.instance import as_fraction

    for x in ("0.25", "0.5", "1.0"):
        n = fd.chain_family_min_n(x)
        inst = fd.gen_chain_family(n, x)
        assert fd.max_value_endowment_ratio(inst) == as_fraction(x)
        assert int((inst.valuations > 0).sum()) == 2 * n - 1


def test_chain_family_rejections():
    with pytest.raises(ValueError, match="below threshold"):
        fd.gen_chain_family(5, 0.25)  # needs n >= 10
    with pytest.raises(ValueError, match="at least"):
        fd.gen_chain_family(10, 0.1)


def test_cen_suboptimal_example():
    inst = fd.gen_cen_suboptimal(2, 2, 1)
    assert inst.valuations.tolist() == [[1, 1], [1, 1]]
    assert inst.endowments.tolist() == [1, 3]
    with pytest.raises(ValueError, match="infeasible"):
        fd.gen_cen_suboptimal(3, 2, 1)
    with pytest.raises(ValueError, match="infeasible"):
        fd.gen_cen_suboptimal(2, 2, 0)


def test_cen_suboptimal_satisfies_inequality_by_construction():
    for n, m, eps in [(2, 2, 1), (2, 3, "0.5"), (3, 4, 2)]:
        inst = fd.gen_cen_suboptimal(n, m, eps)
        rep = fd.breakdown_check(inst, verify=False)
        assert rep.applicable and rep.condition_holds


def test_serialize_roundtrip_identity():
    inst = fd.gen_two_good_skew(8, 0.1)
    assert fd.parse(fd.serialize(inst)) == inst


def test_parse_rejects_bad_documents():
    inst = fd.gen_identical_goods(2, 0.5)
    text = fd.serialize(inst)
    with pytest.raises(ValueError, match="malformed"):
        fd.parse(text[: len(text) // 2])
    doc = json.loads(text)
    doc["endowments"][0] = 0
    with pytest.raises(ValueError, match="non-positive endowment"):
        fd.parse(json.dumps(doc))


@settings(max_examples=40, deadline=None, derandomize=True)
@given(
    st.integers(1, 4),
    st.integers(1, 5),
    st.integers(0, 2**32 - 1),
    st.integers(1, 50),
)
def test_serialize_roundtrip_random(n, m, seed, e_max):
    inst = fd.generate_random(fd.GenConfig(n, m, e_max, seed=seed))
    assert fd.parse(fd.serialize(inst)) == inst


def test_instance_file_helpers(tmp_path):
    inst = fd.gen_cen_suboptimal(2, 2, 1)
    path = tmp_path / "inst.json"
    fd.save_instance(inst, path)
    assert fd.load_instance(path) == inst
