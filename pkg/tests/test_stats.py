import csv
import io
import math

import numpy as np
import pytest

from conftest import column
from ising_interfaces.errors import PreconditionError
from ising_interfaces.interface import cells_to_plus, flat_interface
from ising_interfaces.lattice import Box, Region
from ising_interfaces.sampler import Constraint, sample_conditional, sample_interfaces
from ising_interfaces.spins import enumerate_exact
from ising_interfaces.stats import (
    AlphaTable, RestrictedView, TailTable, alpha_estimate, alpha_exact, batch_means_ci, connection_tops, gamma,
    gamma_in_corridor, isodim_check, m_star, max_stats, nested_excess_tail, pillar_tail, wilson,
)
from ising_interfaces.verification import ring_environment


def test_wilson_interval_contains_estimate():
    lo, hi = wilson(25, 100)
    assert lo < 0.25 < hi
    assert wilson(0, 50)[0] == 0.0


def test_flat_samples_have_empty_tails(box, flat):
    tail, reach = pillar_tail([flat] * 5, h_max=3)
    assert tail.total == 5 * box.n_base_faces
    assert all(tail.p_hat(h) == 0 for h in (1, 2, 3))
    assert reach.p_hat(1) == 0
    r = nested_excess_tail([flat] * 3, r_max=5)
    assert r.count(0) == r.total and r.count(1) == 0


def test_one_in_four_reaches_height_one(box, flat, bump):
    tail, _ = pillar_tail([bump, flat, flat, flat], x=(1, 1), h_max=2)
    assert tail.p_hat(1) == 0.25
    assert tail.p_hat(2) == 0.0


def test_tail_table_is_merge_order_independent(rng):
    vals = rng.integers(0, 6, size=300)
    parts = [TailTable.from_values(vals[k::3], 4) for k in range(3)]
    a = parts[0].merge(parts[1]).merge(parts[2])
    b = parts[2].merge(parts[0]).merge(parts[1])
    whole = TailTable.from_values(vals, 4)
    assert np.array_equal(a.hist, whole.hist) and np.array_equal(b.hist, whole.hist)
    assert all(np.diff(whole.counts) <= 0)
    with pytest.raises(PreconditionError):
        whole.merge(TailTable.empty(5))
    with pytest.raises(PreconditionError):
        TailTable.from_values([-1], 3)


def test_rate_matches_conditional_ratio():
    t = TailTable.from_values([0] * 900 + [1] * 90 + [2] * 10, 3)
    rate, lo, hi = t.rate(1)
    assert rate == pytest.approx(-math.log(10 / 100))
    assert lo < rate < hi
    assert math.isnan(TailTable.from_values([0, 0], 3).rate(1)[0])


def test_cold_run_has_no_excursions():
    samples = sample_interfaces(Box(8, 8, 4), 50.0, 1000, sweeps_between=1, burn_in=5, seed=2)
    tail, _ = pillar_tail(samples, h_max=2)
    assert tail.p_hat(1) == 0.0


def test_alpha_exact_matches_enumeration():
    box = Box(1, 1, 2)
    beta = 0.7
    table = alpha_exact(box, beta, [1, 2])
    meas = enumerate_exact(box, beta)
    configs = meas.configs.reshape((-1,) + box.shape)
    j, i = box.column_index((1, 1))
    plus = configs[:, box.H, j, i] > 0
    assert table.alpha(1) == pytest.approx(-math.log(meas.probs[plus].sum()), abs=1e-12)
    assert table.alpha(1) <= table.alpha(2) and table.monotone()


def test_connection_tops_on_a_column(box):
    I = column(box, (1, 1), 2)
    from ising_interfaces.interface import spins_of
    tops = connection_tops(spins_of(I).spins, box.H)
    assert tops[box.column_index((1, 1))] == 1
    assert tops[box.column_index((3, 3))] == -1
    batch = np.stack([spins_of(I).spins, spins_of(flat_interface(box)).spins])
    bt = connection_tops(batch, box.H)
    assert bt[0][box.column_index((1, 1))] == 1 and bt[1].max() == -1


def test_alpha_estimate_is_monotone_and_near_four_beta():
    t = alpha_estimate(Box(6, 6, 4), 1.0, [1, 2, 3], N=300, seed=5, sweeps_between=5, burn_in=100)
    assert t.monotone()
    # at beta = 1 the entropy of diagonal continuations makes alpha_2 < 2 alpha_1 by about one unit
    assert t.superadditivity_violations(0.0)
    assert not t.superadditivity_violations(1.0)
    assert 2.0 < t.alpha(1) < 5.0
    assert t.alpha_bar == pytest.approx(4 + math.exp(-4))
    lo, hi = t.ci(1)
    assert lo < t.alpha(1) < hi


def test_superadditivity_detection():
    good = AlphaTable.from_values({1: 4.0, 2: 8.5, 3: 12.6, 4: 17.0}, 1.0)
    assert good.superadditivity_violations() == []
    bad = AlphaTable.from_values({1: 4.0, 2: 6.0}, 1.0)
    assert bad.superadditivity_violations() == [(1, 1)]
    assert bad.superadditivity_violations(2.0) == []


def test_censored_alpha_is_a_lower_bound():
    t = AlphaTable(1.0, {1: 10, 2: 0}, 1000)
    assert t.censored(2) and not t.censored(1)
    assert t.ci(2)[1] == math.inf
    assert t.alpha(2) == pytest.approx(-math.log(wilson(0, 1000)[1]))
    text = t.to_csv()
    back = AlphaTable.from_csv(text, 1.0)
    assert back.heights == [1]
    with pytest.raises(PreconditionError):
        AlphaTable.from_csv("h,alpha,censored\n1,3.0,True\n", 1.0)


def test_alpha_csv_has_expected_columns():
    t = AlphaTable(1.0, {1: 40, 2: 4}, 1000)
    rows = list(csv.DictReader(io.StringIO(t.to_csv())))
    assert [int(r["h"]) for r in rows] == [1, 2]
    assert float(rows[0]["alpha"]) == pytest.approx(-math.log(0.04))


def test_m_star_and_gamma_synthetic():
    table = {h: 4.0 * h for h in range(1, 8)}
    s = math.exp(10)
    assert m_star(s, table, 1.0) == 3
    g = gamma(s, table, 1.0)
    assert math.isclose(g, math.exp(-2), rel_tol=1e-12)
    assert gamma_in_corridor(g, 1.0, eps=1.0)
    last = 0
    for k in range(8):
        cur = m_star(math.exp(10) * 2**k, table, 1.0)
        assert cur >= last
        last = cur
    assert gamma(s, AlphaTable.from_values(table, 1.0), 1.0) == g


def test_m_star_needs_long_enough_table():
    with pytest.raises(PreconditionError):
        m_star(math.exp(40), {1: 4.0, 2: 8.0}, 1.0)
    with pytest.raises(PreconditionError):
        m_star(0, {1: 4.0}, 1.0)


def test_max_stats_flat_ring_environment():
    box = Box(5, 5, 4)
    I_ring, S, W = ring_environment(box, 4)
    ms = max_stats([I_ring] * 4, S, W)
    assert ms.ceiling_height == 1 and (ms.Mbar == 0).all() and (ms.M == 1).all()
    assert ms.good_event_frequency(1) == 1.0


def test_max_stats_identity_on_conditional_samples():
    box = Box(5, 5, 4)
    _, S, W = ring_environment(box, 4)
    samples = list(sample_conditional(box, 1.0, Constraint(S, W), 40, sweeps_between=3, burn_in=20, seed=6))
    ms = max_stats(samples, S, W)
    for I, mbar in zip(samples, ms.Mbar):
        view = RestrictedView(I, S, W)
        cols = tuple(np.array([box.column_index((x, y)) for x, y in S.faces]).T)
        assert view.pillar_heights()[cols].max() == mbar
    assert ms.n == 40


def test_restricted_view_fast_path(bump):
    v = RestrictedView(bump)
    assert v.restricted is bump and v.ceiling_height == 0


def test_isodim_examples():
    assert not isodim_check(Region.square(5), 2)
    assert isodim_check(Region.square(50), 3)
    assert not isodim_check(Region.of([(1, 1)]), 2.01)
    assert not isodim_check(Region.of([(1, 1)]), 1.99)
    with pytest.raises(PreconditionError):
        isodim_check(Region.square(2), 0)


def test_batch_means_interval_matches_wilson_for_independent_draws():
    rng = np.random.default_rng(8)
    s = rng.binomial(100, 0.1, size=2000)
    p, lo, hi = batch_means_ci(s, np.full(2000, 100))
    wl, wh = wilson(int(s.sum()), 200000)
    assert lo < p < hi
    assert 0.7 < (hi - lo) / (wh - wl) < 1.4


def test_batch_means_interval_widens_for_clustered_draws():
    rng = np.random.default_rng(9)
    s = 100 * rng.binomial(1, 0.1, size=2000)
    p, lo, hi = batch_means_ci(s, np.full(2000, 100))
    wl, wh = wilson(int(s.sum()), 200000)
    assert (hi - lo) > 5 * (wh - wl)


def test_batch_means_interval_needs_enough_samples():
    with pytest.raises(PreconditionError):
        batch_means_ci([1, 2], [10, 10], n_batches=50)
