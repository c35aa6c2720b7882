import pytest

from conftest import column
from ising_interfaces.errors import AdmissibilityError, PreconditionError
from ising_interfaces.interface import cells_to_plus, extract, flat_interface, spins_of
from ising_interfaces.lattice import Box, Region
from ising_interfaces.sampler import sample_interfaces
from ising_interfaces.verification import interface_of_heights, ring_environment, sos_height_functions
from ising_interfaces.walls import (
    Decomposition, StandardWallCollection, Wall, ceiling_of_collection, collection_excess, decompose,
    excess_area, height_at, hull, level_lines, nested_sequence, nests, reconstruct, represent, standardize,
    wall_column,
)


def _samples(n=40, seed=21):
    return list(sample_interfaces(Box(6, 6, 4), 1.0, n, sweeps_between=3, burn_in=30, seed=seed))


def test_flat_decomposition(flat):
    walls, ceilings = decompose(flat)
    assert walls == [] and len(ceilings) == 1 and ceilings[0].height == 0


def test_bump_decomposition(bump):
    walls, ceilings = decompose(bump)
    assert len(walls) == 1 and len(walls[0]) == 4
    assert sorted(c.height for c in ceilings) == [0, 1]
    top = [c for c in ceilings if c.height == 1][0]
    assert len(top.faces) == 1


def test_faces_split_into_walls_and_ceilings():
    for I in _samples():
        walls, ceilings = decompose(I)
        assert sum(len(W) for W in walls) + sum(len(C.faces) for C in ceilings) == len(I)


def test_nesting_and_hulls(bump):
    W = decompose(bump)[0][0]
    assert nests((1, 1), W)
    assert not nests((11, 1), W)
    top = [c for c in decompose(bump)[1] if c.height == 1][0]
    assert hull(top, bump) == top.faces


def test_annulus_hull_contains_hole(flat):
    ring = Region.square(2).faces - Region.square(1).faces
    I = cells_to_plus(flat, [(x, y, 1) for x, y in ring])
    d = Decomposition(I)
    annulus = [c for c in d.ceilings if c.height == 1][0]
    assert len(annulus.faces) == 12
    assert {(x, y, 2) for x, y in Region.square(1).faces} <= d.hull_of_ceiling(annulus)
    assert len(d.hull_of_ceiling(annulus)) == 16


def test_standardize_examples(bump):
    W = decompose(bump)[0][0]
    assert standardize(W, bump) == W
    box = Box(4, 4, 6)
    plateau = cells_to_plus(flat_interface(box), [(x, y, z) for x, y in Region.square(3).faces for z in (1, 3, 5)])
    I = cells_to_plus(plateau, [(1, 1, 7)])
    d = Decomposition(I)
    small = min(d.walls, key=len)
    assert d.floor_of(small) == 3
    assert standardize(small, I) == small.translated(-3) == wall_column((1, 1), 1)
    assert standardize(standardize(small, I), floor=0) == standardize(small, I)


def test_reconstruct_empty_is_flat(box, flat):
    assert reconstruct(StandardWallCollection(box, ())) == flat


def test_sos_round_trip_small_enumeration():
    box = Box(3, 3, 3)
    count = 0
    for heights in sos_height_functions(6, 6):
        I = interface_of_heights(box, heights)
        C = represent(I)
        assert reconstruct(C) == I and represent(reconstruct(C)) == C
        count += 1
    assert count == 193


def test_smallest_non_height_function_interface():
    box = Box(4, 4, 4)
    cfg = spins_of(flat_interface(box))
    cfg.spins[box.cell_index((1, 1, -1))] = -1
    cfg.spins[box.cell_index((1, 1, 1))] = 1
    I = extract(cfg)
    assert I.column_counts[box.column_index((1, 1))] == 3
    C = represent(I)
    assert C.face_count() == 11 and len(C) == 1
    assert reconstruct(C) == I


def test_nested_walls_are_lifted(box):
    plateau = cells_to_plus(flat_interface(box), [(x, y, 1) for x, y in Region.square(3).faces])
    I = cells_to_plus(plateau, [(1, 1, 3), (-3, -3, 3)])
    C = represent(I)
    assert len(C) == 3 and wall_column((1, 1), 1) in C.walls and wall_column((-3, -3), 1) in C.walls
    J = reconstruct(C)
    assert J == I
    assert (1, 1, 4) in J and (-3, -3, 4) in J


def test_round_trip_on_samples():
    for I in _samples():
        C = represent(I)
        assert reconstruct(C) == I


def test_admissibility_rejects_touching_walls(box):
    C = StandardWallCollection(box, (wall_column((1, 1), 1), wall_column((3, 3), 1)))
    with pytest.raises(AdmissibilityError):
        reconstruct(C)


def test_nested_sequence_examples(box, flat, bump):
    assert nested_sequence((1, 1), flat) == []
    assert len(nested_sequence((1, 1), bump)) == 1
    for I in _samples(20, 22):
        d = Decomposition(I)
        for x in I.box.base_faces:
            top = max((f[2] + (f[2] % 2)) // 2 for f in I.face_set if (f[0], f[1]) == x[:2] and f[2] % 2 == 0)
            seq = nested_sequence(x, I, d)
            assert sum(d.standard_of(W).excess() for W in seq) >= 4 * top


def test_excess_examples(flat, bump):
    assert excess_area(flat, flat) == 0
    W = decompose(bump)[0][0]
    assert W.shape.faces == frozenset() and W.excess() == 4 == len(W.shape.edges)
    for I in _samples(20, 23):
        C = represent(I)
        assert excess_area(I, flat_interface(I.box)) == C.excess() == collection_excess(C.walls)


def test_heights_and_level_lines(box, flat, bump):
    assert all(height_at(flat, x) == 0 for x in box.base_faces)
    lines = level_lines(flat, 0)
    assert len(lines) == 1 and len(lines[0]) == 4 * 2 * box.n
    assert height_at(bump, (1, 1)) == 1
    assert sorted(level_lines(bump, 1)[0]) == [(0, 1, 0), (1, 0, 0), (1, 2, 0), (2, 1, 0)]
    cfg = spins_of(flat)
    cfg.spins[box.cell_index((1, 1, -1))] = -1
    cfg.spins[box.cell_index((1, 1, 1))] = 1
    assert height_at(extract(cfg), (1, 1)) is None


def test_ceiling_of_collection_examples(box):
    _, C, h = ceiling_of_collection(StandardWallCollection(box, ()), Region.full(box))
    assert h == 0 and C.outer
    _, S, W = ring_environment(box, 3)
    assert ceiling_of_collection(W, S)[2] == 1
    wide = Box(6, 6, 3)
    half = cells_to_plus(flat_interface(wide), [(x, y, 1) for x in range(1, 12, 2) for y in range(-11, 12, 2)])
    walls = represent(half)
    assert len(walls) == 1
    assert frozenset((0, y, 1) for y in range(-11, 12, 2)) <= walls.walls[0].faces
    assert ceiling_of_collection(walls, Region.of([(3, 1), (5, 1)]))[2] == 1
    with pytest.raises(PreconditionError):
        ceiling_of_collection(walls, Region.of([(-3, 1), (3, 1)]))
