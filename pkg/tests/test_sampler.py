import numpy as np
import pytest

from ising_interfaces.errors import PreconditionError
from ising_interfaces.interface import flat_interface
from ising_interfaces.lattice import Box, Region
from ising_interfaces.sampler import (
    ChainState, Constraint, detailed_balance_error, exact_tv, heat_bath_table, sample_conditional,
    sample_interfaces,
)
from ising_interfaces.spins import SpinConfig
from ising_interfaces.verification import ring_environment
from ising_interfaces.walls import Decomposition, excess_area, represent


def test_zero_beta_is_fair_coin():
    assert np.allclose(heat_bath_table(0.0), 0.5)


def test_empirical_matches_exact_measure():
    assert exact_tv(Box(1, 1, 1), 0.5, 10**7, seed=3) < 0.01


def test_detailed_balance_holds_exactly():
    assert detailed_balance_error(Box(1, 1, 1), 0.5) < 1e-15


def test_fixed_seed_is_bit_identical():
    box = Box(3, 3, 3)
    runs = []
    for _ in range(2):
        st = ChainState.new(SpinConfig.ground(box), 1.0, seed=7)
        st.sweep(20)
        runs.append(st.cfg.spins.copy())
    assert np.array_equal(runs[0], runs[1])
    other = ChainState.new(SpinConfig.ground(box), 1.0, seed=8)
    other.sweep(20)
    assert not np.array_equal(runs[0], other.cfg.spins)


def test_cold_chain_stays_flat():
    box = Box(3, 3, 3)
    flat = flat_interface(box)
    assert all(I == flat for I in sample_interfaces(box, 50.0, 20, sweeps_between=2, burn_in=5, seed=1))


def test_empty_stream():
    assert list(sample_interfaces(Box(2), 1.0, 0)) == []


def test_bad_stream_arguments():
    with pytest.raises(PreconditionError):
        list(sample_interfaces(Box(2), 1.0, 5, sweeps_between=0))


def test_mean_excess_is_seed_stable():
    box = Box(8, 8, 6)
    flat = flat_interface(box)
    means, ses = [], []
    for seed in (1, 2):
        xs = np.array([excess_area(I, flat) for I in sample_interfaces(box, 1.0, 200, 5, 100, seed=seed)])
        means.append(xs.mean())
        ses.append(xs.std(ddof=1) / np.sqrt(len(xs)))
    assert np.isfinite(means).all()
    assert abs(means[0] - means[1]) <= 3 * np.hypot(*ses)


def test_ring_constraint_holds_on_every_sample():
    box = Box(5, 5, 4)
    _, S, W = ring_environment(box, 4)
    con = Constraint(S, W)
    for I in sample_conditional(box, 1.0, con, 30, sweeps_between=2, burn_in=10, seed=4):
        assert con.holds(I)
        assert con.holds_by_walls(I)
        d = Decomposition(I)
        assert sorted(map(d.standard_of, d.exterior_walls(S)), key=lambda w: w.sorted_faces()) == \
            sorted(W.walls, key=lambda w: w.sorted_faces())


def test_unchecked_bulk_changes_keep_the_constraint():
    box = Box(8, 8, 6)
    _, S, W = ring_environment(box, 7)
    con = Constraint(S, W)
    stream = sample_conditional(box, 1.0, con, 40, sweeps_between=2, burn_in=10, seed=6)
    assert all(con.holds(I) for I in stream)
    assert stream.state.unchecked_changes > 0
    assert 0 < stream.state.rejections < stream.state.checks


def test_constraint_rejects_walls_touching_region():
    box = Box(4, 4, 3)
    _, _, W = ring_environment(box, 2)
    with pytest.raises(PreconditionError):
        Constraint(Region.square(2), W)


def test_empty_constraint_never_binds():
    box = Box(4, 4, 4)
    con = Constraint(Region.full(box), represent(flat_interface(box)))
    assert len(con.allowed_cells()) == box.n_cells
    samples = list(sample_conditional(box, 1.0, con, 20, sweeps_between=2, burn_in=5, seed=5))
    free = list(sample_interfaces(box, 1.0, 20, sweeps_between=2, burn_in=5, seed=5))
    assert samples == free


def test_sensitive_columns_are_near_exterior():
    box = Box(6, 6, 4)
    _, S, W = ring_environment(box, 5)
    con = Constraint(S, W)
    sens = con.sensitive_columns
    inner = Region.square(2)
    for x, y in inner.faces:
        assert not sens[box.column_index((x, y, 0))]
