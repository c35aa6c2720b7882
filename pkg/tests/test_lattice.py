import pytest

from ising_interfaces.lattice import (
    CELL, EDGE, FACE, VERTEX, Box, Region, adjacent, classify, components, face_normal,
    is_horizontal_face, project, star_adjacent,
)


def test_classify_examples():
    assert classify((1, 1, 1)).kind == CELL
    k = classify((1, 1, 0))
    assert k.kind == FACE and k.axes == (2,)
    k = classify((0, 1, 0))
    assert k.kind == EDGE and k.axes == (1,)
    assert classify((0, 0, 0)).kind == VERTEX


def test_horizontal_face_and_normal():
    assert is_horizontal_face((1, 1, 6))
    assert not is_horizontal_face((0, 1, 5))
    assert face_normal((0, 1, 5)) == 0


def test_project_examples():
    assert project((1, 1, 6)) == (1, 1, 0)
    assert project((0, 1, 5)) == (0, 1, 0)
    for f in [(1, 1, 6), (0, 1, 5), (1, 0, 3)]:
        assert project(project(f)) == project(f)


def test_adjacency_examples():
    assert adjacent((1, 1, 0), (3, 1, 0))
    assert not adjacent((1, 1, 0), (3, 3, 0))
    assert star_adjacent((1, 1, 0), (3, 3, 0))
    assert not adjacent((1, 1, 0), (1, 1, 0))
    assert not star_adjacent((1, 1, 0), (1, 1, 0))


def test_components_modes():
    pair = [(1, 1, 0), (3, 3, 0)]
    assert len(components(pair, mode="star")) == 1
    assert len(components(pair, mode="edge")) == 2
    square = [(-1, -1, 0), (1, -1, 0), (-1, 1, 0), (1, 1, 0)]
    comps = components(square, mode="edge")
    assert len(comps) == 1 and len(comps[0]) == 4


def test_box_indexing_round_trip():
    box = Box(3, 2, 4)
    assert box.shape == (8, 4, 6)
    assert box.n_cells == 8 * 3 * 2 * 4
    for k in range(box.shape[0]):
        for j in range(box.shape[1]):
            for i in range(box.shape[2]):
                c = box.cell_coord(k, j, i)
                assert box.contains_cell(c)
                assert box.cell_index(c) == (k, j, i)
    assert len(box.base_faces) == box.n_base_faces
    assert not box.contains_cell((7, 1, 1))


def test_box_rejects_nonpositive():
    with pytest.raises(ValueError):
        Box(0)


def test_region_square_and_boundary():
    S = Region.square(2)
    assert len(S) == 16
    assert (1, 1, 0) in S and (5, 1, 0) not in S
    assert len(S.edge_boundary()) == 16
    assert S.is_simply_connected()
    assert len(Region.full(Box(3))) == 36
