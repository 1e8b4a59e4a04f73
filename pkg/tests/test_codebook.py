import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from srmu.codebook import (Codebook, CodebookError, build_codebook, cleanup_state,
                           decode_device, ground_truth_memory)
from srmu.fhrr import ZeroNormError, bind, cosine_sim, l2_norm, unbind, zeros

# tests/oracles/vsa_oracle.py: norm of sum_i bind(k_i, v0) over 2000 draws at D=256
# min 32.42, mean 35.77, max 39.25 (incoherent estimate sqrt(5) * 16 = 35.78)
GT_NORM_MEAN = 35.77
GT_NORM_RANGE = (30.0, 42.0)


def test_build_deterministic():
    a = build_codebook(5, 5, 256, seed=7)
    b = build_codebook(5, 5, 256, seed=7)
    assert np.array_equal(a.device_keys, b.device_keys)
    assert np.array_equal(a.state_values, b.state_values)
    c = build_codebook(5, 5, 256, seed=8)
    assert not np.array_equal(a.device_keys, c.device_keys)


def test_pairwise_quasi_orthogonal():
    cb = build_codebook(5, 5, 256, seed=1)
    vecs = np.vstack([cb.device_keys, cb.state_values])
    sims = [cosine_sim(a, b) for a, b in itertools.combinations(vecs, 2)]
    assert len(sims) == 45
    assert max(sims) < 0.25


def test_mean_pairwise_cosine():
    sims = []
    for seed in range(20):
        cb = build_codebook(5, 5, 256, seed=seed)
        vecs = np.vstack([cb.device_keys, cb.state_values])
        sims += [cosine_sim(a, b) for a, b in itertools.combinations(vecs, 2)]
    # same oracle as the random pair test: 0.0554 +- 0.0292 per pair
    assert abs(np.mean(sims) - math.sqrt(math.pi / 1024)) < 4 * 0.0292 / math.sqrt(len(sims))


def test_unreachable_orthogonality_fails():
    # at dim=1 any two phasors have cosine exactly 1
    with pytest.raises(CodebookError):
        build_codebook(2, 2, 1, seed=0, max_retries=5)


@pytest.mark.parametrize("K,S,dim", [(0, 5, 8), (2, 1, 8), (2, 2, 0)])
def test_build_rejects_bad_shapes(K, S, dim):
    with pytest.raises(ValueError):
        build_codebook(K, S, dim, seed=0)


def test_ground_truth_single_device():
    cb = build_codebook(1, 5, 256, seed=3)
    assert np.array_equal(ground_truth_memory(cb, [2]), bind(cb.device_keys[0], cb.state_values[2]))


def test_ground_truth_norm_all_same_state():
    norms = [l2_norm(ground_truth_memory(build_codebook(5, 5, 256, seed=s), [0] * 5))
             for s in range(50)]
    assert GT_NORM_RANGE[0] < min(norms) and max(norms) < GT_NORM_RANGE[1]
    assert abs(np.mean(norms) - GT_NORM_MEAN) < 1.0


def test_ground_truth_self_similarity_and_range():
    cb = build_codebook(5, 5, 256, seed=3)
    g = ground_truth_memory(cb, [0, 1, 2, 3, 4])
    assert cosine_sim(g, g) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(IndexError):
        ground_truth_memory(cb, [0, 1, 2, 3, 5])
    with pytest.raises(ValueError):
        ground_truth_memory(cb, [0, 1])


def test_ground_truth_permutation_equivariant():
    cb = build_codebook(5, 5, 256, seed=4)
    states = np.array([4, 0, 2, 2, 1])
    perm = np.array([3, 1, 4, 0, 2])
    permuted = Codebook(cb.device_keys[perm], cb.state_values, cb.seed)
    assert np.allclose(ground_truth_memory(cb, states), ground_truth_memory(permuted, states[perm]),
                       rtol=0, atol=1e-12)


def test_cleanup_examples():
    cb = build_codebook(5, 5, 256, seed=9)
    idx, sim = cleanup_state(cb, cb.state_values[3])
    assert idx == 3 and sim == pytest.approx(1.0, abs=1e-12)
    k2, v4 = cb.device_keys[2], cb.state_values[4]
    idx, sim = cleanup_state(cb, unbind(bind(k2, v4), k2))
    assert idx == 4 and sim == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ZeroNormError):
        cleanup_state(cb, zeros(256))


def test_cleanup_ties_pick_lowest_index():
    vals = np.exp(1j * np.zeros((3, 4)))
    cb = Codebook(np.exp(1j * np.zeros((1, 4))), vals, seed=0)
    assert cleanup_state(cb, vals[0])[0] == 0


@given(st.integers(0, 4), st.integers(0, 4))
def test_prop_decode_after_encode(i, s):
    cb = build_codebook(5, 5, 256, seed=11)
    k = cb.device_keys[i]
    idx, sim = cleanup_state(cb, unbind(bind(k, cb.state_values[s]), k))
    assert idx == s
    assert abs(sim - 1.0) <= 1e-10


def test_decode_device_from_bundle():
    cb = build_codebook(5, 5, 256, seed=5)
    states = [1, 3, 0, 4, 2]
    m = ground_truth_memory(cb, states)
    assert [decode_device(cb, m, i)[0] for i in range(5)] == states


def test_json_roundtrip(tmp_path):
    cb = build_codebook(3, 4, 16, seed=21)
    cb.dump(tmp_path / "cb.json")
    back = Codebook.load(tmp_path / "cb.json")
    assert back.seed == 21 and (back.n_devices, back.n_states, back.dim) == (3, 4, 16)
    assert np.array_equal(back.device_keys, cb.device_keys)
    assert np.array_equal(back.state_values, cb.state_values)
