import pytest

from ising_interfaces import verification, walls
from ising_interfaces.interface import flat_interface
from ising_interfaces.lattice import Box


def test_quick_suite_passes_selected_criteria():
    results = verification.run("quick", 1, only=[3, 8, 12])
    assert [r.number for r in results] == [3, 8, 12]
    assert all(r.passed for r in results), [r.line() for r in results]


def test_sos_enumeration_counts():
    assert sum(1 for _ in verification.sos_height_functions(6, 6)) == 193


def test_broken_reconstruction_is_detected(monkeypatch):
    real = walls.reconstruct

    def broken(swc, box=None, validate=False):
        if swc.walls:
            return flat_interface(swc.box)
        return real(swc, box, validate)

    monkeypatch.setattr(walls, "reconstruct", broken)
    r = verification.criterion_2("quick", 1)
    assert not r.passed
    assert r.measured["reconstruct_represent_fail"] > 0


def test_result_line_format():
    r = verification.CriterionResult(7, "swap", True, {"pairs": 3}, 1.25)
    assert r.line().startswith("PASS criterion  7 swap")
    assert r.to_json()["criterion"] == 7


def test_unknown_level_rejected():
    with pytest.raises(Exception):
        verification.run("medium", 1)


def test_sampler_criterion_is_excluded_from_quick_level():
    assert 1 not in verification.QUICK
