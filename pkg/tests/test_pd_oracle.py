import itertools

import numpy as np
import pytest
from hypothesis import given

from adthin.autocorr import AutocorrTarget, autocorrelation, target_me
from adthin.layout import GridSpec, Mask, all_shifts, cyclic_shift, flat_mask, sample_mask
from adthin.optimizer import GaConfig, run_me_ad
from adthin.oracle import AD_CAP, PD_CAP, brute_autocorrelation, enumerate_chunk, exhaust_landscape
from adthin.pattern import mask_matching_error, power_pattern
from adthin.pd_baseline import cost_pd, cost_pd_batch, run_pd
from strategies import bit_arrays

ALL_ZERO_DB = Mask(((-1.0, 1.0, 0.0),))


def planted(bits):
    a = np.asarray(bits)
    return AutocorrTarget(values=autocorrelation(a).astype(float), kind="planted",
                          num_elements=int(a.sum()))


class TestPdCost:
    def test_examples(self):
        g = GridSpec(4)
        assert cost_pd([1, 1, 0, 1], ALL_ZERO_DB, g) == 0.0
        g = GridSpec(12)
        assert cost_pd(np.ones(12), flat_mask(g, -13.0), g) == 0.0

    @given(bit_arrays(3, 24, nonempty=True))
    def test_delegates_to_pattern_module(self, a):
        g = GridSpec(a.size)
        mask = flat_mask(g, -12)
        assert cost_pd(a, mask, g) == mask_matching_error(power_pattern(a, g), mask)

    def test_batch(self, rng):
        g = GridSpec(10)
        mask = flat_mask(g, -10)
        pop = (rng.random((7, 10)) < 0.5).astype(np.int8)
        pop[:, 0] = 1
        np.testing.assert_allclose(cost_pd_batch(pop, mask, g), [cost_pd(r, mask, g) for r in pop])

    def test_run_deterministic_without_shift(self):
        g = GridSpec(16)
        mask = flat_mask(g, -12)
        r1 = run_pd(mask, g, 10, GaConfig(rng_seed=4))
        r2 = run_pd(mask, g, 10, GaConfig(rng_seed=4))
        np.testing.assert_array_equal(r1.layout, r2.layout)
        assert r1.shift == 0 and r1.target is None
        assert r1.cost == r1.xi == r1.xi_parent
        assert r1.num_elements == 10

    def test_requires_count(self):
        g = GridSpec(8)
        with pytest.raises(ValueError):
            run_pd(flat_mask(g, -10), g, 0)


class TestOracle:
    def test_brute_examples(self):
        assert brute_autocorrelation([1, 1, 1, 1]) == [4, 4, 4, 4]
        assert brute_autocorrelation([0, 0, 0, 0]) == [0, 0, 0, 0]
        assert brute_autocorrelation([1, 1, 0, 1]) == [3, 2, 2, 2]

    def test_enumeration_order(self):
        rows = enumerate_chunk(3, 0, 8)
        assert rows[5].tolist() == [1, 0, 1]
        assert {tuple(r) for r in rows} == set(itertools.product([0, 1], repeat=3))

    def test_p4_planted(self):
        land = exhaust_landscape(4, objective="ad", target=planted([1, 1, 0, 1]))
        assert land.min_cost == 0.0
        got = {tuple(w) for w in land.witnesses}
        assert got == {tuple(r) for r in all_shifts([1, 1, 0, 1])}

    def test_p7_difference_set(self):
        ds = [0, 1, 1, 0, 1, 0, 0]
        land = exhaust_landscape(7, objective="ad", target=AutocorrTarget(
            np.array([3.0, 1, 1, 1, 1, 1, 1]), "x", 3))
        got = {tuple(w) for w in land.witnesses}
        # the (7,3,1) set and its reversal (the other residue class) in all shifts
        expected = {tuple(r) for r in all_shifts(ds)} | {tuple(r) for r in all_shifts(ds[::-1])}
        assert land.min_cost == 0.0 and got == expected
        for w in land.witnesses:
            assert autocorrelation(w).tolist() == [3, 1, 1, 1, 1, 1, 1]

    def test_caps(self):
        with pytest.raises(ValueError, match="capped"):
            exhaust_landscape(AD_CAP + 1, objective="ad", target=planted([1] * (AD_CAP + 1)))
        g = GridSpec(PD_CAP + 1)
        with pytest.raises(ValueError, match="capped"):
            exhaust_landscape(PD_CAP + 1, flat_mask(g, -10), g, objective="pd")

    def test_histogram_and_filter(self, tmp_path):
        g = GridSpec(10)
        mask = flat_mask(g, -12)
        land = exhaust_landscape(10, mask, g, N_filter=5, objective="pd")
        assert land.costs.size == 252
        edges, freq = land.histogram(0.05)
        assert freq.sum() == pytest.approx(1.0)
        assert edges[0] <= land.min_cost
        vals, counts = land.raw_counts()
        assert counts.sum() == 252
        land.to_histogram_csv(tmp_path / "h.csv", 0.05, comment="x")
        assert (tmp_path / "h.csv").read_text().startswith("# x\ncost_bin,relative_frequency\n")
        brute = min(mask_matching_error(power_pattern(r, g), mask)
                    for r in enumerate_chunk(10, 1, 1024) if r.sum() == 5)
        assert land.min_cost == pytest.approx(brute)

    def test_per_count_me_target(self):
        g = GridSpec(8)
        land = exhaust_landscape(8, flat_mask(g, -10), g, objective="ad")
        assert land.costs.size == 255

    def test_empty_filter(self):
        with pytest.raises(ValueError):
            exhaust_landscape(4, objective="ad", target=planted([1, 1, 0, 1]), N_filter=9)

    def test_near_optimal_count_excludes_optima(self):
        land = exhaust_landscape(6, objective="ad", target=planted([1, 1, 0, 1, 0, 0]))
        q = np.quantile(land.costs, 0.5)
        expected = int(np.sum((land.costs <= q + 1e-10) & (land.costs > land.min_cost + 1e-10)))
        assert land.near_optimal_count(0.5) == expected


def test_shift_is_a_bijection_on_witnesses():
    land = exhaust_landscape(8, objective="ad", target=planted([1, 1, 0, 1, 0, 0, 0, 0]))
    got = {tuple(w) for w in land.witnesses}
    for w in land.witnesses:
        for s in range(8):
            assert tuple(cyclic_shift(w, s)) in got


@pytest.mark.slow
def test_planted_targets_p24():
    from conftest import HOMOMETRIC_24, PLANT_24

    def classes(bits):
        land = exhaust_landscape(24, objective="ad", target=planted(bits), N_filter=int(bits.sum()),
                                 max_witnesses=10 ** 5)
        assert land.min_cost == 0.0
        return {min(tuple(r) for r in all_shifts(w)) for w in land.witnesses}

    # zero cost does not imply shift equivalence in general: 8 homometric shift classes here
    assert len(classes(HOMOMETRIC_24)) == 8
    assert classes(PLANT_24) == {min(tuple(r) for r in all_shifts(PLANT_24))}


def test_oracle_bounds_ga_p16():
    g = GridSpec(16)
    mask = flat_mask(g, -15)
    t = target_me(sample_mask(mask, g), 10)
    floor = exhaust_landscape(16, mask, g, N_filter=10, objective="ad", target=t).min_cost
    pd_floor = exhaust_landscape(16, mask, g, N_filter=10, objective="pd").min_cost
    for seed in range(5):
        assert run_me_ad(mask, g, 10, GaConfig(rng_seed=seed)).cost >= floor - 1e-12
        assert run_pd(mask, g, 10, GaConfig(rng_seed=seed)).cost >= pd_floor - 1e-12
