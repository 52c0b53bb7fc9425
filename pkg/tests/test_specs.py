import json

import pytest

from equik.gcw import euler_marks
from equik.groups import build_group
from equik.gsets import orbit_decomposition
from equik.specs import (SpecError, load_document, parse_complex, parse_group, parse_gset, parse_module,
                         parse_ring, parse_span, parse_subgroup)


def write(tmp_path, doc, name="spec.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


def test_group_forms():
    assert parse_group("S3").order == 6
    assert parse_group({"perm_generators": [[1, 0, 3, 2], [2, 3, 0, 1]]}).order == 4
    with pytest.raises(SpecError, match="^group"):
        parse_group(7)
    with pytest.raises(SpecError):
        parse_group("C99")


def test_subgroup_forms():
    lat = build_group("S3").lattice
    assert parse_subgroup(lat, "G") == lat.whole and parse_subgroup(lat, "e") == lat.trivial
    assert parse_subgroup(lat, {"class": 2}) == lat.reps[2]
    assert parse_subgroup(lat, {"elements": [0, 1]}) == lat.subgroup([0, 1])
    assert parse_subgroup(lat, {"generators": [2]}).order == 3
    with pytest.raises(SpecError, match=r"x\.class: expected a class index in 0\.\.3"):
        parse_subgroup(lat, {"class": 9}, "x")
    with pytest.raises(SpecError, match="x"):
        parse_subgroup(lat, {"elements": [0, 2]}, "x")      # not closed


def test_gset_forms():
    lat = build_group("C4").lattice
    assert parse_gset(lat, {"orbits": ["e", "G"]}).size == 5
    assert orbit_decomposition(parse_gset(lat, {"census": [0, 2, 1]})).census == (0, 2, 1)
    x = parse_gset(lat, {"points": 4, "generators": [[1, 2, 3, 0]]}, group_spec="C4")
    assert orbit_decomposition(x).census == (1, 0, 0)
    assert parse_gset(lat, {"action": [[0], [0], [0], [0]]}).size == 1
    with pytest.raises(SpecError, match=r"gset\.census"):
        parse_gset(lat, {"census": [1, 1]})
    with pytest.raises(SpecError, match=r"gset\.orbits\[0\]"):
        parse_gset(lat, {"orbits": ["G"], "universe": "e"})
    with pytest.raises(SpecError):
        parse_gset(lat, {"points": 4, "generators": {"1": [1, 2, 0, 3]}})
    with pytest.raises(SpecError, match="expected one of"):
        parse_gset(lat, {})


def test_span_ring_module():
    lat = build_group("C2").lattice
    w = parse_span(lat, {"H": "e", "K": "G", "middle": {"orbits": ["e"]}, "r": [0, 1], "t": [0, 0]})
    assert w.middle.size == 2
    with pytest.raises(SpecError, match=r"span\.r"):
        parse_span(lat, {"H": "e", "K": "G", "middle": {"orbits": ["e"]}, "r": "x", "t": [0, 0]})
    r = parse_ring(lat, "constant")
    assert parse_ring(lat, None).label == r.label
    with pytest.raises(SpecError, match="available"):
        parse_ring(lat, "nope")
    p = parse_module(r, {"gset": {"orbits": ["e", "G"]}})
    assert p.rank(lat.trivial) == 3
    with pytest.raises(SpecError, match="Yoneda"):
        parse_module(r, {"gset": {"orbits": ["e"]}, "idempotent": [1]})
    with pytest.raises(SpecError, match="idempotent"):
        parse_module(r, {"gset": {"orbits": ["G"]}, "idempotent": [2]})


def test_complex_forms():
    g, x = parse_complex({"group": "C2", "catalog": "octahedron_c2"})
    assert euler_marks(x) == (2, 0)
    with pytest.raises(SpecError, match="not admissible"):
        parse_complex({"group": "C2", "vertices": {"points": 2, "generators": [[1, 0]]}, "simplices": [[0, 1]]})
    _, y = parse_complex({"group": "C2", "vertices": {"points": 2, "generators": [[1, 0]]},
                          "simplices": [[0, 1]], "subdivide": True})
    assert y.is_admissible()
    with pytest.raises(SpecError, match=r"complex\.simplices\[0\]"):
        parse_complex({"group": "C2", "vertices": {"orbits": ["e"]}, "simplices": [[0, 5]]})


def test_documents(tmp_path):
    assert load_document(write(tmp_path, {"group": "C2"}))["group"] == "C2"
    toml = write(tmp_path, 'group = "C4"\n[gset]\ncensus = [1, 0, 0]\n', "spec.toml")
    assert load_document(toml)["gset"]["census"] == [1, 0, 0]
    with pytest.raises(SpecError, match=r"spec\.json:1:"):
        load_document(write(tmp_path, "{bad"))
    with pytest.raises(SpecError, match="cannot read"):
        load_document(tmp_path / "missing.json")
