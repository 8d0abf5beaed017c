import json
from fractions import Fraction as Q

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from gcbp.core import GcbpError, Packing, validate_instance
from gcbp.fileio import (
    InstanceFile,
    ParseError,
    instance_to_file,
    packing_document,
    parse_instance_file,
    read_instance_file,
    read_packing_file,
    write_instance_file,
    write_packing_file,
)


def write_doc(path, doc):
    path.write_text(json.dumps(doc))
    return path


def test_parse_example(tmp_path):
    p = write_doc(tmp_path / "a.json", {"sizes": ["1/2", "1/2"], "cost": ["0", "1", "1"]})
    inst = parse_instance_file(p)
    assert inst.cost.table == (0, 1, 1) and inst.sizes == (Q(1, 2), Q(1, 2))


def test_zero_denominator(tmp_path):
    p = write_doc(tmp_path / "a.json", {"sizes": ["1/0"], "cost": ["0", "1"]})
    with pytest.raises(ParseError, match=r"sizes\[0\]"):
        parse_instance_file(p)


def test_float_rejected(tmp_path):
    p = write_doc(tmp_path / "a.json", {"sizes": [0.5], "cost": ["0", "1"]})
    with pytest.raises(ParseError):
        parse_instance_file(p)


def test_bad_json_has_line(tmp_path):
    p = tmp_path / "a.json"
    p.write_text('{\n "sizes": [\n')
    with pytest.raises(ParseError, match="line"):
        parse_instance_file(p)


def test_invalid_instance_wrapped(tmp_path):
    p = write_doc(tmp_path / "a.json", {"sizes": ["3/2"], "cost": ["0", "1"]})
    with pytest.raises(ParseError):
        parse_instance_file(p)


def test_missing_file(tmp_path):
    with pytest.raises(GcbpError):
        parse_instance_file(tmp_path / "nope.json")


@settings(suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(
    st.lists(st.fractions(0, 1, max_denominator=30), max_size=8),
    st.data(),
)
def test_instance_round_trip(tmp_path, sizes, data):
    incs = data.draw(st.lists(st.fractions(0, 4, max_denominator=9), min_size=len(sizes), max_size=len(sizes)))
    table = [Q(0)]
    for k, d in enumerate(incs):
        table.append(table[-1] + d + (Q(1, 3) if k == 0 else 0))
    inst = validate_instance(sizes, table)
    path = tmp_path / "rt.json"
    write_instance_file(path, inst)
    assert parse_instance_file(path) == inst


def test_packing_document_fields(tmp_path):
    inst = validate_instance([Q(1, 2), Q(1, 2), Q(1, 4)], [0, 2, 3, 4])
    p = Packing.of([[1, 3], [2]])
    doc = packing_document(inst, p, {"x": 1}, "greedy")
    assert doc["bins"][0] == {"items": [1, 3], "cardinality": 2, "cost": "3/2", "raw_cost": "3"}
    assert doc["total_cost"] == "5/2" and doc["total_cost_raw"] == "5"
    assert doc["certificate"] == {"x": 1} and doc["num_bins"] == 2
    path = tmp_path / "p.json"
    write_packing_file(path, inst, p)
    assert read_packing_file(path) == p


def test_packing_file_rejects_garbage(tmp_path):
    p = write_doc(tmp_path / "p.json", {"format": "gcbp-packing", "bins": [{"items": ["a"]}]})
    with pytest.raises(ParseError):
        read_packing_file(p)


def test_metadata_preserved(tmp_path):
    data = InstanceFile([Q(1, 3)], [Q(0), Q(2)], {"name": "x", "seed": 4})
    path = tmp_path / "m.json"
    write_instance_file(path, data)
    assert read_instance_file(path) == data
    assert instance_to_file(data.to_instance()).cost == [0, 2]
