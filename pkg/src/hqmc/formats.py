"""JSON interchange for models.

One document per model, with a top-level "kind" choosing the schema:

    matrix     list of rows, every entry a two-element list [re, im]
    vector     list of [re, im] entries
    operation  {"kraus": [matrix, ...]}, at least one matrix
    hqmc       {"kind": "hqmc", "dim", "states", "trans": {"t|s": operation},
                "init": {"s": matrix}}
    qmc        {"kind": "qmc", "dim", "op": operation, "init": matrix}
    slhqmc     hqmc fields plus "ap": [prop, ...], "label": {"s": [prop, ...]}
    hqa        {"kind": "hqa", "dim", "states", "alphabet",
                "trans": {symbol: {"t|s": operation}}, "init", "fashion"}
    qa         {"kind": "qa", "dim", "alphabet", "ops": {symbol: operation},
                "init": matrix, "p_acc": matrix}
    blm        {"kind": "blm", "n", "alphabet", "mats": {symbol: matrix},
                "pi": vector, "eta": vector}
    dfa        {"kind": "dfa", "states", "alphabet": [[prop, ...], ...],
                "delta": {"q|symbol": "q'"}, "q0", "accepting"}

Absent "trans" and "init" keys denote zero operations and zero masses. An
alphabet symbol is a plain string or, for label alphabets, a sorted list of
propositions; inside map keys a label set renders as "{a,b}" ("{}" for the
empty set). The "|" character is reserved as the key separator, which is
why state names and symbols may not contain it. Floats are written with
repr-level precision, so reading a written file reproduces the doubles
exactly. The HQA "fashion" is one of

    {"classical": {"accept": [state, ...]}}
    {"quantum": {"p_acc": matrix}}
    {"mixed": {"accept": [state, ...], "p_acc": matrix}}
"""

from __future__ import annotations

import json
import numbers
from pathlib import Path

import numpy as np

from . import linalg
from .errors import FormatError, HqmcError
from .models import (
    BLM,
    Dfa,
    Fashion,
    HQA,
    HqMC,
    QA,
    QMC,
    SLHqMC,
    symbol_str,
)
from .operations import QuantumOperation

KINDS = ("hqmc", "qmc", "slhqmc", "hqa", "qa", "blm", "dfa")


def _fail(where: str, msg: str):
    raise FormatError(f"{where}: {msg}")


def _expect_dict(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        _fail(where, f"expected an object, got {type(obj).__name__}")
    return obj


def _expect_list(obj, where: str) -> list:
    if not isinstance(obj, list):
        _fail(where, f"expected a list, got {type(obj).__name__}")
    return obj


def _expect_str(obj, where: str) -> str:
    if not isinstance(obj, str):
        _fail(where, f"expected a string, got {type(obj).__name__}")
    return obj


def _expect_int(obj, where: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        _fail(where, f"expected an integer, got {obj!r}")
    return obj


def _get(obj: dict, key: str, where: str):
    if key not in obj:
        _fail(where, f"missing required key {key!r}")
    return obj[key]


def _number(obj, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, numbers.Real):
        _fail(where, f"expected a number, got {obj!r}")
    return float(obj)


def scalar_from_json(obj, where: str) -> complex:
    pair = _expect_list(obj, where)
    if len(pair) != 2:
        _fail(where, f"a complex entry is a two-element [re, im] list, got {obj!r}")
    return complex(_number(pair[0], where), _number(pair[1], where))


def scalar_to_json(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_from_json(obj, where: str) -> np.ndarray:
    rows = _expect_list(obj, where)
    if not rows:
        _fail(where, "matrix must have at least one row")
    data = []
    width = None
    for i, row in enumerate(rows):
        row = _expect_list(row, f"{where}[{i}]")
        if width is None:
            width = len(row)
        elif len(row) != width:
            _fail(where, f"rows have inconsistent lengths ({width} vs {len(row)})")
        data.append([scalar_from_json(e, f"{where}[{i}][{j}]") for j, e in enumerate(row)])
    if width == 0:
        _fail(where, "matrix rows must be non-empty")
    try:
        return linalg.as_complex_matrix(data, where)
    except HqmcError as e:
        _fail(where, str(e))


def matrix_to_json(m) -> list:
    a = np.asarray(m, dtype=np.complex128)
    return [[scalar_to_json(a[i, j]) for j in range(a.shape[1])] for i in range(a.shape[0])]


def vector_from_json(obj, where: str) -> np.ndarray:
    entries = _expect_list(obj, where)
    if not entries:
        _fail(where, "vector must be non-empty")
    data = [scalar_from_json(e, f"{where}[{i}]") for i, e in enumerate(entries)]
    try:
        return linalg.as_complex_vector(data, where)
    except HqmcError as e:
        _fail(where, str(e))


def vector_to_json(v) -> list:
    a = np.asarray(v, dtype=np.complex128)
    return [scalar_to_json(z) for z in a]


def operation_from_json(obj, where: str) -> QuantumOperation:
    obj = _expect_dict(obj, where)
    kraus = _expect_list(_get(obj, "kraus", where), f"{where}.kraus")
    if not kraus:
        _fail(where, "an operation needs at least one Kraus matrix")
    mats = [matrix_from_json(k, f"{where}.kraus[{i}]") for i, k in enumerate(kraus)]
    try:
        return QuantumOperation(mats)
    except HqmcError as e:
        _fail(where, str(e))


def operation_to_json(op: QuantumOperation) -> dict:
    return {"kraus": [matrix_to_json(k) for k in op.kraus]}


def symbol_from_json(obj, where: str):
    if isinstance(obj, str):
        if "|" in obj or obj.startswith("{"):
            _fail(where, f"symbol {obj!r} uses reserved characters")
        if not obj:
            _fail(where, "symbol must be non-empty")
        return obj
    if isinstance(obj, list):
        props = [_expect_str(p, f"{where}[{i}]") for i, p in enumerate(obj)]
        try:
            from .models import canon_symbol

            return canon_symbol(props)
        except HqmcError as e:
            _fail(where, str(e))
    _fail(where, f"a symbol is a string or a list of propositions, got {obj!r}")


def symbol_to_json(sym):
    if isinstance(sym, str):
        return sym
    return list(sym)


def symbol_from_key(key: str, where: str):
    if key.startswith("{"):
        if not key.endswith("}"):
            _fail(where, f"malformed label-set key {key!r}")
        inner = key[1:-1]
        if not inner:
            return ()
        parts = inner.split(",")
        if any(not p for p in parts):
            _fail(where, f"malformed label-set key {key!r}")
        try:
            from .models import canon_symbol

            return canon_symbol(parts)
        except HqmcError as e:
            _fail(where, str(e))
    if "|" in key or not key:
        _fail(where, f"malformed symbol key {key!r}")
    return key


def _split_pair(key: str, where: str) -> tuple[str, str]:
    parts = key.split("|")
    if len(parts) != 2 or not parts[0] or not parts[1]:
        _fail(where, f"key {key!r} must have the form 'a|b'")
    return parts[0], parts[1]


def _parse_trans(obj, dim: int, where: str) -> dict:
    obj = _expect_dict(obj, where)
    out = {}
    for key, opobj in obj.items():
        t, s = _split_pair(key, f"{where}[{key!r}]")
        op = operation_from_json(opobj, f"{where}[{key!r}]")
        if op.dim != dim:
            _fail(f"{where}[{key!r}]", f"operation dim {op.dim} does not match model dim {dim}")
        out[(t, s)] = op
    return out


def _parse_init(obj, dim: int, where: str) -> dict:
    obj = _expect_dict(obj, where)
    out = {}
    for s, mobj in obj.items():
        m = matrix_from_json(mobj, f"{where}[{s!r}]")
        if m.shape != (dim, dim):
            _fail(f"{where}[{s!r}]", f"matrix shape {m.shape} does not match model dim {dim}")
        out[s] = m
    return out


def _parse_states(obj, where: str) -> list[str]:
    return [_expect_str(s, f"{where}[{i}]") for i, s in enumerate(_expect_list(obj, where))]


def _parse_alphabet(obj, where: str) -> list:
    return [symbol_from_json(s, f"{where}[{i}]") for i, s in enumerate(_expect_list(obj, where))]


def _wrap_model(ctor, where: str):
    try:
        return ctor()
    except FormatError:
        raise
    except HqmcError as e:
        _fail(where, str(e))


def _parse_hqmc_fields(doc: dict, where: str):
    dim = _expect_int(_get(doc, "dim", where), f"{where}.dim")
    states = _parse_states(_get(doc, "states", where), f"{where}.states")
    trans = _parse_trans(doc.get("trans", {}), dim, f"{where}.trans")
    init = _parse_init(doc.get("init", {}), dim, f"{where}.init")
    return dim, states, trans, init


def _parse_hqmc(doc: dict, where: str) -> HqMC:
    dim, states, trans, init = _parse_hqmc_fields(doc, where)
    return _wrap_model(lambda: HqMC(dim, states, trans, init), where)


def _parse_qmc(doc: dict, where: str) -> QMC:
    dim = _expect_int(_get(doc, "dim", where), f"{where}.dim")
    op = operation_from_json(_get(doc, "op", where), f"{where}.op")
    init = matrix_from_json(_get(doc, "init", where), f"{where}.init")
    return _wrap_model(lambda: QMC(dim, op, init), where)


def _parse_slhqmc(doc: dict, where: str) -> SLHqMC:
    chain = _parse_hqmc(doc, where)
    ap = [
        _expect_str(p, f"{where}.ap[{i}]")
        for i, p in enumerate(_expect_list(_get(doc, "ap", where), f"{where}.ap"))
    ]
    labobj = _expect_dict(_get(doc, "label", where), f"{where}.label")
    label = {}
    for s, props in labobj.items():
        label[s] = [
            _expect_str(p, f"{where}.label[{s!r}][{i}]")
            for i, p in enumerate(_expect_list(props, f"{where}.label[{s!r}]"))
        ]
    return _wrap_model(lambda: SLHqMC(chain, ap, label), where)


def _parse_fashion(doc, where: str) -> Fashion:
    doc = _expect_dict(doc, where)
    if len(doc) != 1:
        _fail(where, "fashion must have exactly one of the keys classical/quantum/mixed")
    key, body = next(iter(doc.items()))
    body = _expect_dict(body, f"{where}.{key}")
    if key == "classical":
        accept = _parse_states(_get(body, "accept", f"{where}.classical"), f"{where}.classical.accept")
        return _wrap_model(lambda: Fashion.classical(accept), where)
    if key == "quantum":
        p = matrix_from_json(_get(body, "p_acc", f"{where}.quantum"), f"{where}.quantum.p_acc")
        return _wrap_model(lambda: Fashion.quantum(p), where)
    if key == "mixed":
        accept = _parse_states(_get(body, "accept", f"{where}.mixed"), f"{where}.mixed.accept")
        p = matrix_from_json(_get(body, "p_acc", f"{where}.mixed"), f"{where}.mixed.p_acc")
        return _wrap_model(lambda: Fashion.mixed(accept, p), where)
    _fail(where, f"unknown fashion {key!r}")


def _parse_hqa(doc: dict, where: str) -> HQA:
    dim = _expect_int(_get(doc, "dim", where), f"{where}.dim")
    states = _parse_states(_get(doc, "states", where), f"{where}.states")
    alphabet = _parse_alphabet(_get(doc, "alphabet", where), f"{where}.alphabet")
    tobj = _expect_dict(doc.get("trans", {}), f"{where}.trans")
    trans = {}
    for symkey, entries in tobj.items():
        sym = symbol_from_key(symkey, f"{where}.trans[{symkey!r}]")
        trans[sym] = _parse_trans(entries, dim, f"{where}.trans[{symkey!r}]")
    init = _parse_init(doc.get("init", {}), dim, f"{where}.init")
    fashion = _parse_fashion(_get(doc, "fashion", where), f"{where}.fashion")
    return _wrap_model(lambda: HQA(dim, states, alphabet, init, trans, fashion), where)


def _parse_qa(doc: dict, where: str) -> QA:
    dim = _expect_int(_get(doc, "dim", where), f"{where}.dim")
    alphabet = _parse_alphabet(_get(doc, "alphabet", where), f"{where}.alphabet")
    oobj = _expect_dict(_get(doc, "ops", where), f"{where}.ops")
    ops = {}
    for symkey, opobj in oobj.items():
        sym = symbol_from_key(symkey, f"{where}.ops[{symkey!r}]")
        ops[sym] = operation_from_json(opobj, f"{where}.ops[{symkey!r}]")
    init = matrix_from_json(_get(doc, "init", where), f"{where}.init")
    p_acc = matrix_from_json(_get(doc, "p_acc", where), f"{where}.p_acc")
    return _wrap_model(lambda: QA(dim, alphabet, init, ops, p_acc), where)


def _parse_blm(doc: dict, where: str) -> BLM:
    n = _expect_int(_get(doc, "n", where), f"{where}.n")
    alphabet = _parse_alphabet(_get(doc, "alphabet", where), f"{where}.alphabet")
    mobj = _expect_dict(_get(doc, "mats", where), f"{where}.mats")
    mats = {}
    for symkey, mjson in mobj.items():
        sym = symbol_from_key(symkey, f"{where}.mats[{symkey!r}]")
        mats[sym] = matrix_from_json(mjson, f"{where}.mats[{symkey!r}]")
    pi = vector_from_json(_get(doc, "pi", where), f"{where}.pi")
    eta = vector_from_json(_get(doc, "eta", where), f"{where}.eta")
    return _wrap_model(lambda: BLM(n, alphabet, mats, pi, eta), where)


def _parse_dfa(doc: dict, where: str) -> Dfa:
    states = _parse_states(_get(doc, "states", where), f"{where}.states")
    alphabet = []
    for i, sym in enumerate(_expect_list(_get(doc, "alphabet", where), f"{where}.alphabet")):
        if not isinstance(sym, list):
            _fail(f"{where}.alphabet[{i}]", "DFA symbols are lists of propositions")
        alphabet.append(symbol_from_json(sym, f"{where}.alphabet[{i}]"))
    dobj = _expect_dict(_get(doc, "delta", where), f"{where}.delta")
    delta = {}
    for key, q2 in dobj.items():
        q, symkey = _split_pair(key, f"{where}.delta[{key!r}]")
        sym = symbol_from_key(symkey, f"{where}.delta[{key!r}]")
        delta[(q, sym)] = _expect_str(q2, f"{where}.delta[{key!r}]")
    q0 = _expect_str(_get(doc, "q0", where), f"{where}.q0")
    accepting = _parse_states(_get(doc, "accepting", where), f"{where}.accepting")
    return _wrap_model(lambda: Dfa(states, alphabet, delta, q0, accepting), where)


_PARSERS = {
    "hqmc": _parse_hqmc,
    "qmc": _parse_qmc,
    "slhqmc": _parse_slhqmc,
    "hqa": _parse_hqa,
    "qa": _parse_qa,
    "blm": _parse_blm,
    "dfa": _parse_dfa,
}


def parse_model(doc, where: str = "<document>"):
    doc = _expect_dict(doc, where)
    kind = _expect_str(_get(doc, "kind", where), f"{where}.kind")
    parser = _PARSERS.get(kind)
    if parser is None:
        _fail(where, f"unknown kind {kind!r}, expected one of {list(KINDS)}")
    return parser(doc, where)


def loads_model(text: str, name: str = "<string>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{name}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    return parse_model(doc, name)


def load_model(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise FormatError(f"{path}: {e.strerror or e}") from None
    return loads_model(text, str(path))


def load_matrix(path) -> np.ndarray:
    """Read a bare matrix document (used for --rho files)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as e:
        raise FormatError(f"{path}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    return matrix_from_json(doc, str(path))


def _trans_to_json(trans) -> dict:
    return {f"{t}|{s}": operation_to_json(op) for (t, s), op in trans.items()}


def _init_to_json(init) -> dict:
    return {s: matrix_to_json(m) for s, m in init.items()}


def _fashion_to_json(f: Fashion) -> dict:
    if f.kind == "classical":
        return {"classical": {"accept": sorted(f.accept)}}
    if f.kind == "quantum":
        return {"quantum": {"p_acc": matrix_to_json(f.p_acc)}}
    return {"mixed": {"accept": sorted(f.accept), "p_acc": matrix_to_json(f.p_acc)}}


def model_to_json(model) -> dict:
    if isinstance(model, SLHqMC):
        out = model_to_json(model.chain)
        out["kind"] = "slhqmc"
        out["ap"] = list(model.ap)
        out["label"] = {s: list(model.label[s]) for s in model.states}
        return out
    if isinstance(model, HqMC):
        return {
            "kind": "hqmc",
            "dim": model.dim,
            "states": list(model.states),
            "trans": _trans_to_json(model.trans),
            "init": _init_to_json(model.init),
        }
    if isinstance(model, QMC):
        return {
            "kind": "qmc",
            "dim": model.dim,
            "op": operation_to_json(model.op),
            "init": matrix_to_json(model.init),
        }
    if isinstance(model, HQA):
        return {
            "kind": "hqa",
            "dim": model.dim,
            "states": list(model.states),
            "alphabet": [symbol_to_json(s) for s in model.alphabet],
            "trans": {
                symbol_str(sym): _trans_to_json(entries)
                for sym, entries in model.trans.items()
            },
            "init": _init_to_json(model.init),
            "fashion": _fashion_to_json(model.fashion),
        }
    if isinstance(model, QA):
        return {
            "kind": "qa",
            "dim": model.dim,
            "alphabet": [symbol_to_json(s) for s in model.alphabet],
            "ops": {symbol_str(sym): operation_to_json(op) for sym, op in model.ops.items()},
            "init": matrix_to_json(model.init),
            "p_acc": matrix_to_json(model.p_acc),
        }
    if isinstance(model, BLM):
        return {
            "kind": "blm",
            "n": model.n,
            "alphabet": [symbol_to_json(s) for s in model.alphabet],
            "mats": {symbol_str(sym): matrix_to_json(m) for sym, m in model.mats.items()},
            "pi": vector_to_json(model.pi),
            "eta": vector_to_json(model.eta),
        }
    if isinstance(model, Dfa):
        return {
            "kind": "dfa",
            "states": list(model.states),
            "alphabet": [symbol_to_json(s) for s in model.alphabet],
            "delta": {
                f"{q}|{symbol_str(sym)}": q2 for (q, sym), q2 in sorted(model.delta.items())
            },
            "q0": model.q0,
            "accepting": sorted(model.accepting),
        }
    raise HqmcError(f"cannot serialize {type(model).__name__}")


def dump_model(model) -> str:
    return json.dumps(model_to_json(model), indent=2) + "\n"


def save_model(model, path) -> None:
    Path(path).write_text(dump_model(model))
