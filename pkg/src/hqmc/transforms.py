"""Conversions between the model tiers.

Every conversion preserves the quantity the source model defines:

* hqmc_to_qmc folds the classical states into the Hilbert space. On the
  enlarged space (classical index major, quantum index minor) the n-step
  state is block diagonal and block s equals the chain's mass at s.
* hqa_to_qa does the same per input symbol and turns the acceptance fashion
  into one projector on the enlarged space.
* qa_to_blm replaces density matrices by their row-stacked vectors and the
  symbol operations by their superoperator matrices, so acceptance becomes
  a bilinear form: eta = vec(P_acc^T)^T makes eta vec(rho) = Tr(P_acc rho)
  hold exactly for arbitrary complex matrices, not only Hermitian ones.
* sl_to_chqa turns a labeled chain into a classically accepting automaton
  over label sets by adding one absorbing sink: reading sigma keeps exactly
  the mass sitting on states labeled sigma and routes everything else to
  the sink, so the acceptance probability of w equals the chain's
  probability of tracing w.
* product synchronizes a labeled chain with a total DFA over the same label
  alphabet; the product is labeled by a single "accept" proposition on
  states whose DFA component is accepting.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .errors import HqmcError
from .models import (
    BLM,
    Dfa,
    Fashion,
    HQA,
    HqMC,
    QA,
    QMC,
    SLHqMC,
    powerset_alphabet,
    symbol_str,
)
from .operations import QuantumOperation


def _require_valid(model, what: str) -> None:
    report = model.validate()
    if not report.ok:
        v = max(report.violations, key=lambda x: x.magnitude)
        raise HqmcError(
            f"{what} is not a valid model: {v.where}: {v.constraint} "
            f"(violation {v.magnitude:.3e})"
        )


def _basis_outer(n: int, t: int, s: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=np.complex128)
    e[t, s] = 1.0
    return e


def _fold_kraus(states, trans, dim: int, tol: float) -> list[np.ndarray]:
    """Kraus list of the folded operation: |t><s| (x) K for every stored
    Kraus matrix K of the edge operation s -> t, columns before rows so the
    order is reproducible. Numerically zero members are dropped."""
    n = len(states)
    kraus = []
    for si, s in enumerate(states):
        for ti, t in enumerate(states):
            op = trans.get((t, s))
            if op is None:
                continue
            sel = _basis_outer(n, ti, si)
            for k in op.kraus:
                if np.linalg.norm(k) <= tol:
                    continue
                kraus.append(np.kron(sel, k))
    if not kraus:
        kraus.append(np.zeros((n * dim, n * dim), dtype=np.complex128))
    return kraus


def _fold_init(states, init, dim: int) -> np.ndarray:
    n = len(states)
    rho = np.zeros((n * dim, n * dim), dtype=np.complex128)
    for si, s in enumerate(states):
        m = init.get(s)
        if m is not None:
            rho[si * dim:(si + 1) * dim, si * dim:(si + 1) * dim] = m
    return rho


def hqmc_to_qmc(m: HqMC) -> QMC:
    """Fold a hybrid chain into a plain quantum chain on |S| * dim dimensions."""
    _require_valid(m, "hqmc")
    tol = m._tol(None)
    op = QuantumOperation(_fold_kraus(m.states, m.trans, m.dim, tol))
    return QMC(len(m.states) * m.dim, op, _fold_init(m.states, m.init, m.dim), tol=m.tol)


def _fold_projector(states, dim: int, fashion: Fashion) -> np.ndarray:
    n = len(states)
    if fashion.kind == "classical":
        p_small = np.eye(dim, dtype=np.complex128)
    else:
        p_small = np.asarray(fashion.p_acc, dtype=np.complex128)
    if fashion.kind == "quantum":
        sel = np.eye(n, dtype=np.complex128)
    else:
        sel = np.zeros((n, n), dtype=np.complex128)
        for si, s in enumerate(states):
            if s in fashion.accept:
                sel[si, si] = 1.0
    return np.kron(sel, p_small)


def hqa_to_qa(a: HQA) -> QA:
    """Fold a hybrid automaton into a quantum automaton, symbol by symbol."""
    _require_valid(a, "hqa")
    tol = a._tol(None)
    ops = {
        sym: QuantumOperation(_fold_kraus(a.states, a.trans[sym], a.dim, tol))
        for sym in a.alphabet
    }
    return QA(
        len(a.states) * a.dim,
        a.alphabet,
        _fold_init(a.states, a.init, a.dim),
        ops,
        _fold_projector(a.states, a.dim, a.fashion),
        tol=a.tol,
    )


def qa_to_blm(a: QA) -> BLM:
    """Vectorize a quantum automaton into a bilinear machine on dim^2."""
    _require_valid(a, "qa")
    mats = {sym: op.superop_matrix() for sym, op in a.ops.items()}
    pi = linalg.vec(a.init)
    eta = linalg.vec(a.p_acc.T)
    return BLM(a.dim * a.dim, a.alphabet, mats, pi, eta)


def sl_to_chqa(m: SLHqMC) -> HQA:
    """Labeled chain to classically accepting automaton over label sets.

    Adds a fresh absorbing sink state. Reading sigma applies the chain's
    transition matrix restricted to source states labeled sigma; mass on any
    other state moves to the sink unchanged, and the sink keeps itself. All
    original states accept, the sink does not, so the acceptance probability
    of a word is exactly the trace probability of that word.
    """
    _require_valid(m, "slhqmc")
    chain = m.chain
    sink = "__sink"
    while sink in set(chain.states):
        sink = sink + "_"
    states2 = chain.states + (sink,)
    alphabet = powerset_alphabet(m.ap)
    ident = QuantumOperation.identity(chain.dim)
    trans = {}
    for sym in alphabet:
        entries = {}
        for s in chain.states:
            if m.label[s] == sym:
                for t in chain.states:
                    op = chain.trans.get((t, s))
                    if op is not None:
                        entries[(t, s)] = op
            else:
                entries[(sink, s)] = ident
        entries[(sink, sink)] = ident
        trans[sym] = entries
    out = HQA(
        chain.dim,
        states2,
        alphabet,
        dict(chain.init),
        trans,
        Fashion.classical(chain.states),
        tol=chain.tol,
    )
    bad = out.validate()
    if not bad.ok:
        raise HqmcError("internal error: sink construction lost column completeness")
    return out


def product_state_name(s: str, q: str) -> str:
    return f"({s},{q})"


ACCEPT_PROP = "accept"


def product(m: SLHqMC, a: Dfa) -> SLHqMC:
    """Synchronous product of a labeled chain with a total DFA.

    The DFA must read the chain's label alphabet (the full powerset of the
    propositions). Product state (s, q) means: the chain sits at s and the
    DFA has already consumed the labels up to and including L(s). The
    product carries the single proposition "accept" on states whose DFA
    component is accepting, so reachability of {accept} in the product is
    exactly the event "the DFA accepts some prefix of the chain's trace".
    """
    _require_valid(m, "slhqmc")
    report = a.validate()
    if not report.ok:
        raise HqmcError("the DFA must be total")
    if set(a.alphabet) != set(powerset_alphabet(m.ap)):
        raise HqmcError("the DFA alphabet must be the powerset of the chain's propositions")
    chain = m.chain
    names = {}
    for s in chain.states:
        for q in a.states:
            names[(s, q)] = product_state_name(s, q)
    if len(set(names.values())) != len(names):
        raise HqmcError("product state names collide; rename chain or DFA states")
    states2 = [names[(s, q)] for s in chain.states for q in a.states]
    label2 = {
        names[(s, q)]: ((ACCEPT_PROP,) if q in a.accepting else ())
        for s in chain.states
        for q in a.states
    }
    init2 = {}
    for s, rho in chain.init.items():
        q = a.step(a.q0, m.label[s])
        init2[names[(s, q)]] = rho
    trans2 = {}
    for (t, s), op in chain.trans.items():
        for q in a.states:
            q2 = a.step(q, m.label[t])
            trans2[(names[(t, q2)], names[(s, q)])] = op
    chain2 = HqMC(chain.dim, states2, trans2, init2, tol=chain.tol)
    return SLHqMC(chain2, (ACCEPT_PROP,), label2)
