from conftest import column
from ising_interfaces.interface import cells_to_plus, flat_interface
from ising_interfaces.lattice import Box
from ising_interfaces.pillars import (
    TRIVIAL_INCREMENT, Pillar, enumerate_increments, hgt, increments, pillar, pillar_bytes,
    pillar_from_bytes, pillar_heights, restricted_pillar, spine_from_increments, spine_of, split,
)
from ising_interfaces.sampler import sample_interfaces
from ising_interfaces.verification import ring_environment
from ising_interfaces.walls import Decomposition, restrict


def _sampled_pillars(n_samples=60, seed=31):
    box = Box(8, 8, 5)
    out = []
    for I in sample_interfaces(box, 1.0, n_samples, sweeps_between=3, burn_in=30, seed=seed):
        heights = pillar_heights(I)
        for x in box.base_faces:
            if heights[box.column_index(x)] > 0:
                out.append((I, pillar(I, x)))
    return out


def test_flat_pillar_is_empty(box, flat):
    P = pillar(flat, (1, 1))
    assert P.empty and hgt(P) == 0


def test_column_pillar_counts(box):
    P = pillar(column(box, (1, 1), 3), (1, 1))
    assert len(P.cells) == 3 and len(P.faces) == 13 and hgt(P) == 3


def test_restricted_pillar_over_ring_ceiling():
    box = Box(6, 6, 6)
    I_ring, S, W = ring_environment(box, 4)
    I = cells_to_plus(I_ring, [(1, 1, 3), (1, 1, 5), (1, 1, 7)])
    P = restricted_pillar(I, (1, 1), S, W)
    assert P == pillar(restrict(I, S, Decomposition(I)), (1, 1)).shifted(1)
    assert P.reference_height == 1 and hgt(P) == 3
    assert max(f[2] for f in P.faces) == 8


def test_column_split_has_trivial_increments():
    box = Box(4, 4, 6)
    for h in (1, 2, 4):
        P = pillar(column(box, (1, 1), h), (1, 1))
        sp = split(P)
        assert len(sp.cut_points) == h and not sp.base_cells
        seq = increments(sp)
        assert seq.T == h - 1
        assert all(X == TRIVIAL_INCREMENT and len(X.faces) == 8 and X.excess == 0 for X in seq.increments)


def test_bulge_gives_nontrivial_increment():
    box = Box(4, 4, 6)
    I = cells_to_plus(column(box, (1, 1), 4), [(3, 1, 3)])
    seq = increments(pillar(I, (1, 1)))
    assert seq.T == 2
    assert not seq.increments[0].trivial and seq.increments[0].excess >= 2
    assert seq.increments[1].trivial


def test_fewer_than_two_cut_points(box, bump):
    seq = increments(pillar(bump, (1, 1)))
    assert seq.T == 0 and seq.remainder is not None and len(seq.remainder.cells) == 1
    empty = split(Pillar.from_cells((1, 1), []))
    assert not empty.base_cells and not empty.spine_cells and empty.cut_points == ()


def test_spine_from_trivial_increments():
    sp = spine_from_increments((1, 1, 1), [TRIVIAL_INCREMENT, TRIVIAL_INCREMENT])
    assert sp.cells == {(1, 1, 1), (1, 1, 3), (1, 1, 5)}
    assert len(sp.cut_points) == 3


def test_hgt_examples(box):
    assert hgt(Pillar.from_cells((1, 1), [])) == 0
    for h in (1, 3):
        assert hgt(pillar(column(box, (1, 1), h), (1, 1))) == h
    P = Pillar.from_cells((1, 1), [(1, 1, 3), (1, 1, 5), (1, 1, 7)], reference_height=1)
    assert hgt(P) == 3


def test_spine_round_trip_on_sampled_pillars():
    count = 0
    for _, P in _sampled_pillars(400):
        sp = split(P)
        if not sp.cut_points:
            continue
        seq = increments(sp)
        rebuilt = spine_from_increments(seq.first_cut, seq.increments, seq.remainder)
        assert rebuilt.cells == sp.spine_cells
        assert rebuilt.faces == spine_of(P).faces
        count += 1
    assert count >= 1000


def test_enumerated_increments_round_trip_and_bounds():
    incs, rems = enumerate_increments(4)
    assert (len(incs), len(rems)) == (1157, 569)
    for X in incs:
        seq = increments(split(Pillar.from_cells((1, 1), X.cells)))
        assert seq.increments == (X,) if seq.T == 1 else False
        if not X.trivial:
            assert X.excess >= 2
            assert len(X.faces) <= 3 * X.excess + 4
    for R in rems:
        sp = spine_from_increments((1, 1, 1), [], R)
        assert sp.cells == R.cells


def test_empty_base_pillars_have_many_faces():
    for _, P in _sampled_pillars(30, 32):
        if not split(P).base_cells:
            assert len(P.faces) >= 4 * hgt(P)


def test_pillars_depend_only_on_nested_walls():
    box = Box(6, 6, 4)
    I = column(box, (1, 1), 2)
    J = cells_to_plus(I, [(-9, -9, 1), (9, 9, 1), (9, -9, 1)])
    assert pillar(I, (1, 1)) == pillar(J, (1, 1))


def test_pillar_bytes_round_trip(box):
    P = pillar(column(box, (1, 1), 2), (1, 1))
    Q, b = pillar_from_bytes(pillar_bytes(P, box))
    assert Q == P and b == box
