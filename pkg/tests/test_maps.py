import pytest

from conftest import column
from ising_interfaces.errors import PreconditionError
from ising_interfaces.interface import cells_to_plus, flat_interface
from ising_interfaces.lattice import Box, Region
from ising_interfaces.maps import (
    IsoParams, closely_nested, cone_containment, cone_sets, insert_column, is_isolated, phi_delete, phi_iso,
    phi_swap, psi_delete, wall_cluster, witness, witness_reconstruct,
)
from ising_interfaces.verification import ring_environment
from ising_interfaces.walls import Decomposition, edge_faces_2d, represent, wall_column

P31 = IsoParams(3, 1)
P13 = IsoParams(1, 3)
P33 = IsoParams(3, 3)


def _plateau_with_bump(bump_x):
    """Height-1 plateau over a 12x12 square with one extra cell on top at bump_x."""
    box = Box(8, 8, 4)
    plateau = cells_to_plus(flat_interface(box), [(x, y, 1) for x, y in Region.square(6).faces])
    return cells_to_plus(plateau, [(bump_x, 1, 3)])


def _big_and_small(I):
    d = Decomposition(I)
    big = max(d.walls, key=len)
    small = min(d.walls, key=len)
    top = [C for C in d.interior_ceilings(big) if C.height == 1][0]
    return d, big, small, top


def test_cluster_without_interior_walls(bump):
    W = Decomposition(bump).walls[0]
    assert wall_cluster({W}, bump).walls == {W}


def test_closely_nested_at_distance_three():
    I = _plateau_with_bump(5)
    d, big, small, top = _big_and_small(I)
    assert small.excess() == 4
    assert closely_nested(small, top, I.box)
    cl = wall_cluster({big}, d)
    assert cl.walls == {big, small} and cl.generations == (frozenset({small}),)
    J = phi_delete({big}, I)
    assert J == flat_interface(I.box)
    assert len(I) - len(J) == cl.excess


def test_not_closely_nested_at_distance_five():
    I = _plateau_with_bump(1)
    d, big, small, top = _big_and_small(I)
    assert not closely_nested(small, top, I.box)
    assert wall_cluster({big}, d).walls == {big}
    J = phi_delete({big}, I)
    assert J == cells_to_plus(flat_interface(I.box), [(1, 1, 1)])


def test_phi_delete_single_bump(flat, bump):
    W = Decomposition(bump).walls[0]
    J = phi_delete({W}, bump)
    assert J == flat and len(bump) - len(J) == 4
    assert phi_delete(set(), J) == J


def test_cluster_stays_inside_hull():
    I = _plateau_with_bump(5)
    d, big, _, _ = _big_and_small(I)
    inside = big.shape.nested_faces
    for W in wall_cluster({big}, d).walls - {big}:
        assert W.shape.faces <= inside
        assert all(set(edge_faces_2d(e)) <= inside for e in W.shape.edges)


def test_phi_delete_keeps_exterior_walls():
    box = Box(6, 6, 4)
    I_ring, S, W = ring_environment(box, 5)
    I = cells_to_plus(I_ring, [(1, 1, 3), (-5, -5, 3)])
    d = Decomposition(I)
    V = {w for w in d.interior_walls(S) if (1, 1) in w.shape.nested_faces}
    J = phi_delete(V, I, W, d)
    assert J == cells_to_plus(I_ring, [(-5, -5, 3)])


def test_phi_delete_rejects_exterior_wall_in_seed():
    box = Box(6, 6, 4)
    I_ring, S, W = ring_environment(box, 5)
    d = Decomposition(I_ring)
    with pytest.raises(PreconditionError):
        phi_delete(set(d.walls), I_ring, W, d)


def test_iso_params_validate():
    with pytest.raises(PreconditionError):
        IsoParams(0, 1)
    assert P31.wall_bound(2) == 0 and P31.wall_bound(100) is None
    assert P31.increment_bound(27) == 0 and P31.increment_bound(28) == 28


def test_isolated_examples():
    box = Box(6, 6, 6)
    I = column(box, (1, 1), 3)
    assert is_isolated(I, (1, 1), p=P33)
    near = cells_to_plus(I, [(5, 1, 1)])
    assert not is_isolated(near, (1, 1), p=P33)
    based = cells_to_plus(I, [(3, 1, 1)])
    assert not is_isolated(based, (1, 1), p=P33)


def test_cone_containment_for_isolated_pillar():
    box = Box(6, 6, 6)
    I = column(box, (1, 1), 3)
    res = cone_containment(I, (1, 1), p=P33)
    assert res == {"pillar_outside": [], "environment_outside": []}
    assert cone_sets((1, 1), 0, IsoParams(3, 2)).overlap(Box(6, 6, 6)) == []


def test_phi_iso_fixed_point():
    box = Box(6, 6, 6)
    I = column(box, (1, 1), 3)
    J, tr = phi_iso(I, (1, 1), p=P33)
    assert J == I and tr.excess == 0 and tr.deleted == []
    assert tr.j_star == tr.T + 1 and not tr.a3
    w = witness(I, J, (1, 1), tr)
    assert w.components == () and w.green
    assert witness_reconstruct(J, w, (1, 1), p=P33) == I


def test_phi_iso_deletes_nearby_bump():
    box = Box(6, 6, 6)
    clean = column(box, (1, 1), 3)
    I = cells_to_plus(clean, [(5, 1, 1)])
    J, tr = phi_iso(I, (1, 1), p=P33)
    assert J == clean and tr.excess == 4 and len(tr.deleted) == 1
    w = witness(I, J, (1, 1), tr)
    assert len(w.blue) == 4 and not w.red
    assert witness_reconstruct(J, w, (1, 1), p=P33) == I


def test_phi_iso_rejects_x_outside_region():
    box = Box(6, 6, 4)
    I_ring, S, W = ring_environment(box, 3)
    with pytest.raises(PreconditionError):
        phi_iso(I_ring, (11, 11), S, W, P31)


def test_phi_iso_costs_when_not_isolated():
    box = Box(8, 8, 6)
    base = column(box, (1, 1), 2)
    for extra in ([(3, 1, 1)], [(5, 1, 1)], [(1, 3, 3), (3, 3, 3)], [(7, 7, 1), (5, 1, 1)]):
        I = cells_to_plus(base, extra)
        assert not is_isolated(I, (1, 1), p=P31)
        J, tr = phi_iso(I, (1, 1), p=P31)
        assert tr.excess >= 1 and is_isolated(J, (1, 1), p=P31)
        assert witness_reconstruct(J, witness(I, J, (1, 1), tr), (1, 1), p=P31) == I


def test_swap_identical_pillars():
    box = Box(6, 6, 6)
    I = column(box, (1, 1), 2)
    assert phi_swap(I, I, (1, 1), (1, 1), p=P13) == (I, I)


def test_swap_ring_and_flat_environments():
    box = Box(6, 6, 8)
    I_ring, S, W = ring_environment(box, 5)
    I = cells_to_plus(I_ring, [(1, 1, 3), (1, 1, 5)])
    I2 = cells_to_plus(flat_interface(box), [(-3, -3, 1), (-3, -3, 3), (-3, -3, 5)])
    J, J2 = phi_swap(I, I2, (1, 1), (-3, -3), S, W, P13)
    assert J == cells_to_plus(I_ring, [(1, 1, 3), (1, 1, 5), (1, 1, 7)])
    assert J2 == cells_to_plus(flat_interface(box), [(-3, -3, 1), (-3, -3, 3)])
    assert len(I) + len(I2) == len(J) + len(J2)
    assert phi_swap(J, J2, (1, 1), (-3, -3), S, W, P13) == (I, I2)


def test_swap_rejects_non_isolated():
    box = Box(6, 6, 6)
    I = cells_to_plus(column(box, (1, 1), 2), [(3, 1, 1)])
    with pytest.raises(PreconditionError):
        phi_swap(I, column(box, (1, 1), 2), (1, 1), (1, 1), p=P13)


def test_psi_delete_column():
    box = Box(6, 6, 6)
    flat = flat_interface(box)
    for h in (1, 2, 4):
        I = column(box, (1, 1), h)
        J = psi_delete(I, (1, 1))
        assert J == flat and len(I) - len(J) == 4 * h


def test_psi_delete_rejects_nonempty_base():
    box = Box(6, 6, 6)
    I = cells_to_plus(column(box, (1, 1), 2), [(3, 1, 1)])
    with pytest.raises(PreconditionError):
        psi_delete(I, (1, 1))


def test_insert_column_examples():
    box = Box(6, 6, 6)
    flat = flat_interface(box)
    J = insert_column(flat, (1, 1), 2)
    assert len(J) - len(flat) == 8 and len(J.face_set ^ flat.face_set) == 10
    assert represent(J).walls == (wall_column((1, 1), 2),)
    assert psi_delete(J, (1, 1)) == flat
    with pytest.raises(PreconditionError):
        insert_column(cells_to_plus(flat, [(3, 1, 1)]), (1, 1), 1)
