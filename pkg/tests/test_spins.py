import numpy as np
import pytest

from ising_interfaces.errors import PreconditionError
from ising_interfaces.lattice import Box
from ising_interfaces.spins import (
    SpinConfig, boundary_spin, delta_energy, energy, enumerate_exact, parse_snapshot, snapshot_bytes,
)


def _pair_energy(box, spins):
    """Disagreeing nearest-neighbour pairs, boundary cells fixed by the sign of height."""
    H2, M2, N2 = spins.shape
    pad = np.zeros((H2 + 2, M2 + 2, N2 + 2), dtype=int)
    for k in range(H2 + 2):
        pad[k] = boundary_spin(2 * (k - 1) - 2 * box.H + 1)
    pad[1:-1, 1:-1, 1:-1] = spins
    total = 0
    for k in range(H2 + 2):
        for j in range(M2 + 2):
            for i in range(N2 + 2):
                for dk, dj, di in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                    a, b, c = k + dk, j + dj, i + di
                    if a >= H2 + 2 or b >= M2 + 2 or c >= N2 + 2:
                        continue
                    inside = lambda k_, j_, i_: 1 <= k_ <= H2 and 1 <= j_ <= M2 and 1 <= i_ <= N2
                    if not (inside(k, j, i) or inside(a, b, c)):
                        continue
                    total += pad[k, j, i] != pad[a, b, c]
    return total


def test_ground_energy_counts_straddling_pairs():
    box = Box(1, 1, 1)
    g = SpinConfig.ground(box)
    assert energy(g) == _pair_energy(box, g.spins) == 4


def test_all_plus_energy_matches_pair_oracle():
    box = Box(2, 1, 2)
    cfg = SpinConfig.constant(box, 1)
    assert energy(cfg) == _pair_energy(box, cfg.spins)


def test_deep_flip_costs_six():
    box = Box(3, 3, 3)
    g = SpinConfig.ground(box)
    c = (1, 1, -3)
    assert delta_energy(g, c) == 6
    assert energy(g.flipped(c)) - energy(g) == 6


def test_delta_energy_matches_recount(rng):
    box = Box(2, 2, 2)
    for _ in range(100):
        spins = rng.choice(np.array([-1, 1], dtype=np.int8), size=box.shape)
        cfg = SpinConfig(box, spins)
        k, j, i = (int(rng.integers(s)) for s in box.shape)
        c = box.cell_coord(k, j, i)
        assert delta_energy(cfg, c) == energy(cfg.flipped(c)) - energy(cfg)
        assert energy(cfg) == _pair_energy(box, spins)


def test_exact_measure_limits():
    box = Box(1, 1, 1)
    m0 = enumerate_exact(box, 0.0)
    assert np.allclose(m0.probs, 1 / 256)
    m = enumerate_exact(box, 0.5)
    assert abs(m.probs.sum() - 1) < 1e-12
    cold = enumerate_exact(box, 50.0)
    assert cold.prob_of(SpinConfig.ground(box)) > 0.999


def test_exact_rejects_large_box():
    with pytest.raises(PreconditionError):
        enumerate_exact(Box(2, 2, 2), 1.0)


def test_snapshot_round_trip():
    box = Box(2, 1, 1)
    cfg = SpinConfig.ground(box).flipped((1, 1, 1))
    back, beta, seed = parse_snapshot(snapshot_bytes(cfg, 0.75, 9))
    assert np.array_equal(back.spins, cfg.spins) and beta == 0.75 and seed == 9
