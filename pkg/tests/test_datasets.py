import pytest

from ergmselect import datasets
from ergmselect.graph import from_edge_list, write_edge_list


def test_fixture_detection(tmp_path, monkeypatch):
    monkeypatch.setenv("ERGMSELECT_DATA", str(tmp_path))
    monkeypatch.setattr(datasets, "PACKAGE_DATA", tmp_path / "none")
    assert not datasets.fixture_available("gamaneg")
    # wrong edge count: present but not the standard version
    write_edge_list(from_edge_list(16, [(1, 2)]), tmp_path / "gamaneg.edgelist")
    assert not datasets.fixture_available("gamaneg")
    with pytest.raises(ValueError, match="29"):
        datasets.load_fixture("gamaneg")
    pairs = [(i, j) for i in range(1, 17) for j in range(i + 1, 17)][:29]
    write_edge_list(from_edge_list(16, pairs), tmp_path / "gamaneg.edgelist")
    assert datasets.fixture_available("gamaneg")
    g, covs = datasets.load_fixture("gamaneg")
    assert g.edge_count == 29 and covs == {}


def test_unknown_fixture():
    with pytest.raises(KeyError):
        datasets.load_fixture("karate")
