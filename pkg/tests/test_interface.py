import numpy as np
import pytest

from ising_interfaces.errors import InvalidInterfaceError, PreconditionError
from ising_interfaces.interface import (
    Interface, cells_to_plus, extract, flat_interface, interface_from_bytes, interface_bytes, spins_of,
    truncate,
)
from ising_interfaces.lattice import Box
from ising_interfaces.pillars import Pillar, pillar
from ising_interfaces.sampler import sample_interfaces
from ising_interfaces.spins import SpinConfig


def test_ground_n1_is_four_base_faces():
    box = Box(1, 1, 1)
    I = extract(SpinConfig.ground(box))
    assert sorted(map(tuple, I.faces.tolist())) == [(-1, -1, 0), (-1, 1, 0), (1, -1, 0), (1, 1, 0)]


def test_single_plus_cell(box, flat, bump):
    faces = bump.face_set
    assert (1, 1, 0) not in faces
    assert {(0, 1, 1), (2, 1, 1), (1, 0, 1), (1, 2, 1), (1, 1, 2)} <= faces
    assert len(bump) == len(flat) + 4


def test_floating_bubble_is_excluded(box, flat):
    cfg = SpinConfig.ground(box).flipped((1, 1, 5))
    assert extract(cfg) == flat


def test_spins_of_examples(box, flat, bump):
    assert np.array_equal(spins_of(flat).spins, SpinConfig.ground(box).spins)
    diff = spins_of(bump).spins != SpinConfig.ground(box).spins
    assert diff.sum() == 1 and diff[box.cell_index((1, 1, 1))]


def test_extract_spins_round_trip_on_samples():
    box = Box(5, 5, 4)
    for I in sample_interfaces(box, 1.0, 100, sweeps_between=3, burn_in=20, seed=11):
        assert extract(spins_of(I)) == I


def test_truncate_examples(box, flat, bump):
    assert truncate(flat, Pillar.from_cells((1, 1, 0), [])) == flat
    assert truncate(bump, pillar(bump, (1, 1, 0))) == flat


def test_truncate_never_grows_empty_base_pillars():
    box = Box(5, 5, 4)
    checked = 0
    for I in sample_interfaces(box, 1.0, 60, sweeps_between=3, burn_in=20, seed=12):
        for x in box.base_faces[::7]:
            P = pillar(I, x)
            if P.empty:
                continue
            from ising_interfaces.pillars import split
            if split(P).base_cells:
                continue
            assert len(truncate(I, P)) <= len(I)
            checked += 1
    assert checked > 0


def test_truncate_rejects_foreign_pillar(flat):
    with pytest.raises(PreconditionError):
        truncate(flat, Pillar.from_cells((1, 1, 0), [(1, 1, 1)]))


def test_from_faces_validates(box):
    with pytest.raises(InvalidInterfaceError):
        Interface.from_faces(box, [(1, 1, 0)])


def test_bytes_round_trip(bump):
    assert interface_from_bytes(interface_bytes(bump)) == bump


def test_heights(box, bump):
    h = bump.column_heights
    assert h[box.column_index((1, 1, 0))] == 1
    assert bump.max_height() == 1
