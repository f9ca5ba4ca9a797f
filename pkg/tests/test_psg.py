from importlib import resources

import pytest
from hypothesis import given, strategies as st

from pmisolate.generate import generate, genus_g_random
from pmisolate.psg import PSGError, load_psg, parse_psg, save_psg, serialize_psg
from pmisolate.schema import SideRef

K5_TEXT = resources.files("pmisolate.data").joinpath("k5_fig1.psg").read_text()


def test_k5_document(k5):
    assert k5.n == 5 and k5.genus == 1
    assert k5.crossing_list(SideRef(1)) == (9,)
    assert k5.crossing_list(SideRef(2)) == (10,)
    assert set(k5.edge(9).endpoints) == {1, 3}
    assert set(k5.edge(10).endpoints) == {2, 4}


def test_empty_document():
    g = parse_psg("psg 1\ngenus 0\nvertices 0\n")
    assert g.n == 0 and g.edges == ()


def test_missing_partner_list_names_pair():
    text = K5_TEXT.replace("crossings T1' 9", "crossings T1'")
    with pytest.raises(PSGError, match="T1") as info:
        parse_psg(text)
    assert info.value.line is not None


def test_syntax_error_names_line():
    text = "psg 1\ngenus 0\nvertices 2\nedge 1 1 x\n"
    with pytest.raises(PSGError) as info:
        parse_psg(text)
    assert info.value.line == 4
    assert str(info.value).startswith("line 4:")


def test_header_first():
    with pytest.raises(PSGError, match="psg"):
        parse_psg("genus 0\n")


def test_unknown_directive():
    with pytest.raises(PSGError, match="unknown directive"):
        parse_psg("psg 1\nbogus 3\n")


def test_rotation_inconsistency():
    text = "psg 1\ngenus 0\nvertices 2\nedge 1 1 2\nrotation 1 1\nrotation 2\n"
    with pytest.raises(PSGError, match="vertex 2") as info:
        parse_psg(text)
    assert info.value.line == 6


def test_unsupported_version():
    with pytest.raises(PSGError, match="version"):
        parse_psg("psg 2\n")


def test_k5_round_trip(k5):
    text = serialize_psg(k5)
    assert serialize_psg(parse_psg(text)) == text
    assert parse_psg(text) == k5


def test_comments_are_dropped_by_canonicalization():
    canon = serialize_psg(parse_psg(K5_TEXT))
    assert not canon.startswith("#")
    assert serialize_psg(parse_psg(canon)) == canon


def test_file_helpers(tmp_path, k5):
    path = tmp_path / "k5.psg"
    save_psg(k5, path)
    assert load_psg(path) == k5


@given(
    st.sampled_from(["planar-grid", "torus-cycle", "k33-torus", "parallel-loops", "genus-g-random"]),
    st.integers(0, 500),
)
def test_generated_documents_round_trip(kind, seed):
    g = generate(kind, seed)
    text = serialize_psg(g)
    assert parse_psg(text) == g
    assert serialize_psg(parse_psg(text)) == text


@given(st.integers(1, 16), st.integers(0, 2), st.integers(0, 1000), st.floats(0, 1))
def test_random_documents_round_trip(n, genus, seed, detach):
    g = genus_g_random(n, genus, seed, tracks=3, detach=detach)
    text = serialize_psg(g)
    assert serialize_psg(parse_psg(text)) == text
