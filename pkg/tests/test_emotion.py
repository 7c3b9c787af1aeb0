import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from affectsim.emotion import (
    EmotionCode,
    MutationParams,
    code_with_etv,
    codes_with_etvs,
    crossover,
    etv,
    mutate,
)

bits32 = st.lists(st.integers(0, 1), min_size=32, max_size=32).map(EmotionCode.from_iterable)


def test_code_with_etv_extremes(rng):
    assert code_with_etv(0, 32, rng) == EmotionCode((0,) * 32)
    assert code_with_etv(32, 32, rng) == EmotionCode((1,) * 32)


@pytest.mark.parametrize("e, m", [(-1, 32), (33, 32), (3, 7), (0, 0)])
def test_code_with_etv_rejects_bad_args(rng, e, m):
    with pytest.raises(ValueError):
        code_with_etv(e, m, rng)


def test_code_with_etv_positions_uniform(rng):
    rows = np.array([code_with_etv(21, 32, rng).bits for _ in range(10_000)])
    assert (rows.sum(axis=1) == 21).all()
    freq = rows.mean(axis=0)
    assert np.all(np.abs(freq - 21 / 32) < 0.02)


def test_codes_with_etvs_popcounts(rng):
    etvs = rng.integers(0, 33, 500)
    assert np.array_equal(codes_with_etvs(etvs, 32, rng).sum(axis=1), etvs)


def test_etv_counts_ones():
    code = EmotionCode.from_string("0110" + "0" * 27 + "1")
    assert etv(code) == 3
    assert etv(EmotionCode((0,) * 32)) == 0
    assert etv(EmotionCode((1,) * 32)) == 32
    assert etv(np.array([1, 0, 1, 1])) == 3


def test_emotion_code_validation():
    with pytest.raises(ValueError):
        EmotionCode((0, 1, 2, 0))
    with pytest.raises(ValueError):
        EmotionCode((0, 1, 1))


@given(bits32, st.integers(0, 2**32))
def test_mutate_rate_zero_is_identity(code, seed):
    assert mutate(code, MutationParams(0.0), np.random.default_rng(seed)) == code


@given(st.integers(0, 2**32))
def test_mutate_rate_one_fills_a_prefix(seed):
    out = mutate(EmotionCode((0,) * 32), MutationParams(1.0), np.random.default_rng(seed))
    length = out.etv
    assert out.bits == (1,) * length + (0,) * (32 - length)


def test_mutate_does_not_touch_input(rng):
    code = EmotionCode((0, 1) * 16)
    before = code.bits
    mutate(code, MutationParams(0.5), rng)
    assert code.bits == before


def test_mutation_expected_flip_count():
    # E[flips] = rate * E[len] = rate * m / 2 for len uniform on {0..m}
    rng = np.random.default_rng(7)
    code = EmotionCode((0,) * 32)
    params = MutationParams(0.05)
    flips = [mutate(code, params, rng).etv for _ in range(100_000)]
    assert abs(np.mean(flips) - 0.8) < 0.05


def test_mutation_params_bounds():
    with pytest.raises(ValueError):
        MutationParams(1.5)


def test_crossover_gamma_zero_is_identity(rng):
    node, info = EmotionCode((0,) * 32), EmotionCode((1,) * 32)
    assert crossover(node, info, 0.0, rng) == node
    # floor(0.03 * 32) == 0
    assert crossover(node, info, 0.03, rng) == node


@given(st.integers(0, 2**32))
def test_crossover_half_window_on_8_bits(seed):
    out = crossover(EmotionCode((0,) * 8), EmotionCode((1,) * 8), 0.5, np.random.default_rng(seed))
    s = "".join(map(str, out.bits))
    assert s.count("1") == 4 and "1111" in s
    assert s.index("1111") in range(5)


@given(bits32, st.floats(0, 1), st.integers(0, 2**32))
def test_crossover_equal_codes_unchanged(code, gamma, seed):
    assert crossover(code, code, gamma, np.random.default_rng(seed)) == code


def test_crossover_length_mismatch(rng):
    with pytest.raises(ValueError):
        crossover(EmotionCode((0,) * 8), EmotionCode((0,) * 10), 0.5, rng)


@settings(max_examples=300)
@given(bits32, bits32, st.floats(0, 1), st.integers(0, 2**32))
def test_crossover_bit_exact_postcondition(node, info, gamma, seed):
    out = crossover(node, info, gamma, np.random.default_rng(seed))
    u = np.random.default_rng(seed).random()
    length = int(np.floor(gamma * 32))
    start = int(u * (32 - length + 1))
    assert 0 <= start <= 32 - length
    for j in range(32):
        expected = info.bits[j] if start <= j < start + length else node.bits[j]
        assert out.bits[j] == expected


@given(bits32, bits32, st.lists(st.tuples(st.booleans(), st.floats(0, 1)), max_size=20), st.integers(0, 2**32))
def test_etv_in_range_after_operator_sequences(code, info, ops, seed):
    rng = np.random.default_rng(seed)
    for is_mut, x in ops:
        code = mutate(code, MutationParams(x), rng) if is_mut else crossover(code, info, x, rng)
        assert len(code) == 32
        assert 0 <= code.etv <= 32


def test_operators_deterministic_under_seed():
    code, info = EmotionCode((0, 1) * 16), EmotionCode((1, 1, 0, 0) * 8)

    def chain(seed):
        rng = np.random.default_rng(seed)
        c = code
        for _ in range(50):
            c = crossover(mutate(c, MutationParams(0.1), rng), info, 0.4, rng)
        return c

    assert chain(3) == chain(3)
