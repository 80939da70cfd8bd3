import json

import numpy as np
import pytest

from hqmc import linalg
from hqmc.errors import FormatError
from hqmc.formats import (
    dump_model,
    load_matrix,
    load_model,
    loads_model,
    matrix_from_json,
    matrix_to_json,
    model_to_json,
    parse_model,
    save_model,
    symbol_from_key,
    symbol_to_json,
    vector_from_json,
    vector_to_json,
)
from hqmc.models import BLM, Dfa, blm_weight, sl_trace_prob

from _gen import all_words, random_blm, random_dfa, random_hqa, random_hqmc, random_slhqmc
from hqmc.transforms import hqa_to_qa, hqmc_to_qmc


def roundtrip(model):
    return parse_model(json.loads(dump_model(model)))


# ---------------------------------------------------------------------------
# scalars, matrices, symbols


def test_matrix_roundtrip_is_exact():
    rng = np.random.default_rng(60)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    back = matrix_from_json(json.loads(json.dumps(matrix_to_json(m))), "m")
    assert np.array_equal(back, m)


def test_vector_roundtrip_is_exact():
    rng = np.random.default_rng(61)
    v = rng.normal(size=5) + 1j * rng.normal(size=5)
    back = vector_from_json(json.loads(json.dumps(vector_to_json(v))), "v")
    assert np.array_equal(back, v)


def test_matrix_parse_errors_carry_location():
    with pytest.raises(FormatError, match="m"):
        matrix_from_json([[1.0]], "m")  # entries must be [re, im] pairs
    with pytest.raises(FormatError):
        matrix_from_json([[[1.0, 0.0]], [[1.0, 0.0], [2.0, 0.0]]], "m")  # ragged
    with pytest.raises(FormatError):
        matrix_from_json([[[True, 0.0]]], "m")  # bool is not a number


def test_symbol_key_parsing():
    assert symbol_from_key("a", "w") == "a"
    assert symbol_from_key("{}", "w") == ()
    assert symbol_from_key("{b,a}", "w") == ("a", "b")
    assert symbol_to_json(("a", "b")) == ["a", "b"]
    assert symbol_to_json("a") == "a"
    with pytest.raises(FormatError):
        symbol_from_key("{a,a}", "w")
    with pytest.raises(FormatError):
        symbol_from_key("a|b", "w")


# ---------------------------------------------------------------------------
# model round-trips


def test_hqmc_roundtrip():
    rng = np.random.default_rng(62)
    m = random_hqmc(rng, 3, 2)
    back = roundtrip(m)
    assert back.kind == "hqmc"
    assert back.states == m.states
    for key, op in m.trans.items():
        assert linalg.max_abs(back.trans[key].superop_matrix() - op.superop_matrix()) == 0.0
    for s, mass in m.init.items():
        assert np.array_equal(back.init[s], mass)
    folded = hqmc_to_qmc(back)
    assert folded.validate().ok


def test_qmc_roundtrip():
    rng = np.random.default_rng(63)
    m = hqmc_to_qmc(random_hqmc(rng, 2, 2))
    back = roundtrip(m)
    assert back.kind == "qmc"
    assert np.array_equal(back.init, m.init)
    assert len(back.op.kraus) == len(m.op.kraus)


def test_slhqmc_roundtrip():
    rng = np.random.default_rng(64)
    m = random_slhqmc(rng, 3, 2, ap=("p", "q"))
    back = roundtrip(m)
    assert back.kind == "slhqmc"
    assert back.ap == m.ap
    assert back.label == m.label
    for w in all_words(m.alphabet, 2, include_empty=False):
        assert abs(sl_trace_prob(back, w) - sl_trace_prob(m, w)) == 0.0


def test_hqa_roundtrip_all_fashions():
    rng = np.random.default_rng(65)
    for kind in ("classical", "quantum", "mixed"):
        a = random_hqa(rng, 2, 2, ("a", "b"), kind)
        back = roundtrip(a)
        assert back.fashion.kind == kind
        if a.fashion.accept is not None:
            assert back.fashion.accept == a.fashion.accept
        if a.fashion.p_acc is not None:
            assert np.array_equal(back.fashion.p_acc, a.fashion.p_acc)


def test_qa_roundtrip():
    rng = np.random.default_rng(66)
    q = hqa_to_qa(random_hqa(rng, 2, 2, ("a", "b"), "mixed"))
    back = roundtrip(q)
    assert back.kind == "qa"
    assert back.alphabet == q.alphabet
    assert np.array_equal(back.p_acc, q.p_acc)


def test_blm_roundtrip():
    rng = np.random.default_rng(67)
    b = random_blm(rng, 3)
    back = roundtrip(b)
    for w in all_words(b.alphabet, 3):
        assert blm_weight(back, w) == blm_weight(b, w)


def test_blm_with_labelset_alphabet_roundtrip():
    b = BLM(1, [(), ("p",)], {(): [[1.0]], ("p",): [[0.5]]}, [1.0], [1.0])
    back = roundtrip(b)
    assert back.alphabet == ((), ("p",))
    assert blm_weight(back, [(), ("p",)]) == 0.5


def test_dfa_roundtrip():
    rng = np.random.default_rng(68)
    d = random_dfa(rng, ("p", "q"))
    back = roundtrip(d)
    assert back.states == d.states
    assert back.alphabet == d.alphabet
    assert back.q0 == d.q0
    assert back.accepting == d.accepting
    assert back.delta == d.delta


# ---------------------------------------------------------------------------
# parse failures


def test_unknown_kind_rejected():
    with pytest.raises(FormatError, match="kind"):
        parse_model({"kind": "markov"})
    with pytest.raises(FormatError):
        parse_model({"dim": 2})
    with pytest.raises(FormatError):
        parse_model([1, 2, 3])


def test_json_error_carries_position():
    with pytest.raises(FormatError, match="line 1"):
        loads_model("{nope}")


def test_missing_file_reports_path(tmp_path):
    with pytest.raises(FormatError, match="nonexistent"):
        load_model(tmp_path / "nonexistent.json")


def test_bad_trans_key_rejected():
    doc = {"kind": "hqmc", "dim": 1, "states": ["a"],
           "trans": {"a": {"kraus": [[[[1.0, 0.0]]]]}},
           "init": {"a": [[[1.0, 0.0]]]}}
    with pytest.raises(FormatError, match="trans"):
        parse_model(doc)


def test_dim_mismatch_rejected():
    doc = {"kind": "hqmc", "dim": 2, "states": ["a"],
           "trans": {"a|a": {"kraus": [[[[1.0, 0.0]]]]}},
           "init": {}}
    with pytest.raises(FormatError):
        parse_model(doc)


def test_semantic_error_wrapped_as_format_error():
    # structurally fine JSON with a duplicate state name
    doc = {"kind": "hqmc", "dim": 1, "states": ["a", "a"], "trans": {}, "init": {}}
    with pytest.raises(FormatError):
        parse_model(doc)


def test_fashion_requires_exactly_one_key():
    rng = np.random.default_rng(69)
    a = random_hqa(rng, 1, 1, ("a",), "classical")
    doc = model_to_json(a)
    doc["fashion"]["quantum"] = {"p_acc": [[[1.0, 0.0]]]}
    with pytest.raises(FormatError, match="fashion"):
        parse_model(doc)


# ---------------------------------------------------------------------------
# files


def test_save_and_load(tmp_path):
    rng = np.random.default_rng(70)
    m = random_hqmc(rng, 2, 2)
    p = tmp_path / "chain.json"
    save_model(m, p)
    text = p.read_text()
    assert text.endswith("\n")
    back = load_model(p)
    assert back.states == m.states


def test_load_matrix(tmp_path):
    p = tmp_path / "rho.json"
    p.write_text(json.dumps([[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]))
    m = load_matrix(p)
    assert np.array_equal(m, np.eye(2) / 2)
