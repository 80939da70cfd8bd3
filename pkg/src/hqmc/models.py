"""Model types and their step and word semantics.

The central object is the hybrid quantum Markov chain (HqMC): a finite set
of classical states, each carrying a partial density matrix on one shared
Hilbert space, and a transition matrix whose entry (t, s) is a quantum
operation applied to the mass that moves from s to t. Validity means every
column sums to a trace-preserving operation and the initial masses form a
distribution (total trace 1).

On top of that sit the labeled chain (SLHqMC, one label per state, words
over the powerset of the atomic propositions), the hybrid automaton (HQA,
one transition matrix per input symbol plus an acceptance fashion), the
purely quantum automaton (QA), the bilinear machine (BLM, weights
eta M_w pi over plain complex matrices), and a total DFA over label sets.

Conventions shared with the file format:

* States are strings; "|" is reserved as the key separator and rejected.
* A symbol is either a plain string or a label set, canonically a sorted
  tuple of proposition names. Label sets render as "{a,b}" in map keys.
* Transition maps are sparse: an absent entry is the zero operation.
* Matrices index states by their position in the declared state list.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

from . import linalg
from .errors import DimensionError, HqmcError
from .operations import QuantumOperation, density_defects

Symbol = Union[str, tuple]

_SEPARATOR = "|"
_SET_CHARS = ("{", "}", ",")


def _check_name(name: str, what: str) -> str:
    name = str(name)
    if not name:
        raise HqmcError(f"{what} must be a non-empty string")
    if _SEPARATOR in name:
        raise HqmcError(f"{what} {name!r} contains the reserved separator {_SEPARATOR!r}")
    return name


def canon_symbol(sym) -> Symbol:
    """Canonical form of a symbol: a plain string, or a sorted tuple of props."""
    if isinstance(sym, str):
        return _check_name(sym, "symbol")
    try:
        props = [str(p) for p in sym]
    except TypeError:
        raise HqmcError(f"symbol must be a string or an iterable of propositions, got {sym!r}")
    for p in props:
        _check_name(p, "proposition")
        if any(c in p for c in _SET_CHARS):
            raise HqmcError(f"proposition {p!r} contains a reserved character")
    if len(set(props)) != len(props):
        raise HqmcError(f"label set {props!r} has duplicate propositions")
    return tuple(sorted(props))


def symbol_str(sym: Symbol) -> str:
    """Rendering used in map keys: plain string, or '{a,b}' for label sets."""
    if isinstance(sym, str):
        return sym
    return "{" + ",".join(sym) + "}"


def powerset_alphabet(ap: Iterable[str]) -> tuple[tuple, ...]:
    """All subsets of the propositions, ordered by size then lexicographically."""
    props = tuple(sorted({str(p) for p in ap}))
    out = []
    for r in range(len(props) + 1):
        out.extend(itertools.combinations(props, r))
    return tuple(out)


def _check_states(states) -> tuple[str, ...]:
    out = tuple(_check_name(s, "state name") for s in states)
    if not out:
        raise HqmcError("a model needs at least one state")
    if len(set(out)) != len(out):
        raise HqmcError("state names must be unique")
    return out


def _check_dim(dim) -> int:
    dim = int(dim)
    if dim < 1:
        raise DimensionError(f"Hilbert space dimension must be >= 1, got {dim}")
    return dim


def _tr(m) -> float:
    return float(np.trace(m).real)


# ---------------------------------------------------------------------------
# validation reports


@dataclass
class Violation:
    where: str
    constraint: str
    magnitude: float

    def to_json(self) -> dict:
        return {"where": self.where, "constraint": self.constraint, "magnitude": self.magnitude}


@dataclass
class ValidationReport:
    """Outcome of numeric validation: every violated invariant with the size
    of its worst violation, not just a boolean."""

    kind: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def worst(self) -> float:
        return max((v.magnitude for v in self.violations), default=0.0)

    def add(self, where: str, constraint: str, magnitude: float) -> None:
        self.violations.append(Violation(where, constraint, float(magnitude)))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "valid": self.ok,
            "violations": [v.to_json() for v in self.violations],
        }


def _validate_init(report: ValidationReport, init: Mapping[str, np.ndarray], tol: float) -> None:
    total = 0.0
    for s, m in init.items():
        herm, neg, _ = density_defects(m)
        if herm > tol:
            report.add(f"init[{s}]", "initial mass must be Hermitian", herm)
        if neg > tol:
            report.add(f"init[{s}]", "initial mass must be positive semidefinite", neg)
        total += _tr(m)
    if abs(total - 1.0) > tol:
        report.add("init", "initial masses must have total trace 1", abs(total - 1.0))


def _validate_projector(report: ValidationReport, p: np.ndarray, where: str, tol: float) -> None:
    herm = linalg.hermiticity_defect(p)
    idem = linalg.max_abs(p @ p - p)
    if herm > tol:
        report.add(where, "acceptance operator must be Hermitian", herm)
    if idem > tol:
        report.add(where, "acceptance operator must be idempotent", idem)


def _ordered_trans(
    states: tuple[str, ...], trans, dim: int, what: str
) -> dict[tuple[str, str], QuantumOperation]:
    """Normalize a sparse transition map to column-major state order."""
    sset = set(states)
    for (t, s), op in trans.items():
        if t not in sset or s not in sset:
            raise HqmcError(f"{what} entry ({t!r}, {s!r}) names an unknown state")
        if not isinstance(op, QuantumOperation):
            raise HqmcError(f"{what} entry ({t!r}, {s!r}) is not a QuantumOperation")
        if op.dim != dim:
            raise DimensionError(
                f"{what} entry ({t!r}, {s!r}) has dim {op.dim}, expected {dim}"
            )
    ordered = {}
    for s in states:
        for t in states:
            if (t, s) in trans:
                ordered[(t, s)] = trans[(t, s)]
    return ordered


def _ordered_init(
    states: tuple[str, ...], init, dim: int
) -> dict[str, np.ndarray]:
    sset = set(states)
    for s in init:
        if s not in sset:
            raise HqmcError(f"initial distribution names an unknown state {s!r}")
    out = {}
    for s in states:
        if s in init:
            m = linalg.as_complex_matrix(init[s], f"init[{s}]")
            if m.shape != (dim, dim):
                raise DimensionError(f"init[{s}] has shape {m.shape}, expected ({dim}, {dim})")
            out[s] = m
    return out


# ---------------------------------------------------------------------------
# chains


class HqMC:
    """Hybrid quantum Markov chain.

    trans maps (target, source) pairs to quantum operations; absent pairs are
    the zero operation. init maps states to their initial partial density
    matrices; absent states carry zero mass.
    """

    kind = "hqmc"

    def __init__(self, dim, states, trans, init, tol: float | None = None):
        self.dim = _check_dim(dim)
        self.states = _check_states(states)
        self.trans = _ordered_trans(self.states, dict(trans), self.dim, "transition")
        self.init = _ordered_init(self.states, dict(init), self.dim)
        self.tol = None if tol is None else linalg.resolve_tol(tol)
        self._zero = QuantumOperation.zero(self.dim)

    def _tol(self, tol: float | None) -> float:
        if tol is not None:
            return linalg.resolve_tol(tol)
        if self.tol is not None:
            return self.tol
        return linalg.get_default_tol()

    def op(self, t: str, s: str) -> QuantumOperation:
        """Operation on the edge s -> t, the zero operation if unset."""
        if t not in set(self.states) or s not in set(self.states):
            raise HqmcError(f"unknown state in transition lookup ({t!r}, {s!r})")
        return self.trans.get((t, s), self._zero)

    def initial_distribution(self) -> dict[str, np.ndarray]:
        """Initial masses for every state, zeros filled in, fresh arrays."""
        zero = np.zeros((self.dim, self.dim), dtype=np.complex128)
        return {s: np.array(self.init.get(s, zero)) for s in self.states}

    def underlying_edges(self, tol: float | None = None) -> set[tuple[str, str]]:
        """Directed graph edges (source, target) with a nonzero operation."""
        tol = self._tol(tol)
        return {(s, t) for (t, s), op in self.trans.items() if not op.is_zero(tol)}

    def validate(self, tol: float | None = None) -> ValidationReport:
        tol = self._tol(tol)
        report = ValidationReport(self.kind)
        i = np.eye(self.dim)
        for s in self.states:
            acc = np.zeros((self.dim, self.dim), dtype=np.complex128)
            for t in self.states:
                op = self.trans.get((t, s))
                if op is not None:
                    acc += op.completeness_sum()
            mag = linalg.max_abs(acc - i)
            if mag > tol:
                report.add(f"column {s}", "column must sum to a trace-preserving operation", mag)
        _validate_init(report, self.init, tol)
        return report


class QMC:
    """Quantum Markov chain: one trace-preserving operation and one initial state."""

    kind = "qmc"

    def __init__(self, dim, op: QuantumOperation, init, tol: float | None = None):
        self.dim = _check_dim(dim)
        if not isinstance(op, QuantumOperation):
            raise HqmcError("op must be a QuantumOperation")
        if op.dim != self.dim:
            raise DimensionError(f"operation dim {op.dim} does not match model dim {self.dim}")
        self.op = op
        self.init = linalg.as_complex_matrix(init, "init")
        if self.init.shape != (self.dim, self.dim):
            raise DimensionError(f"init has shape {self.init.shape}, expected ({dim}, {dim})")
        self.tol = None if tol is None else linalg.resolve_tol(tol)

    def _tol(self, tol: float | None) -> float:
        if tol is not None:
            return linalg.resolve_tol(tol)
        if self.tol is not None:
            return self.tol
        return linalg.get_default_tol()

    def validate(self, tol: float | None = None) -> ValidationReport:
        tol = self._tol(tol)
        report = ValidationReport(self.kind)
        mag = linalg.max_abs(self.op.completeness_sum() - np.eye(self.dim))
        if mag > tol:
            report.add("op", "step operation must be trace-preserving", mag)
        herm, neg, _ = density_defects(self.init)
        if herm > tol:
            report.add("init", "initial state must be Hermitian", herm)
        if neg > tol:
            report.add("init", "initial state must be positive semidefinite", neg)
        dev = abs(_tr(self.init) - 1.0)
        if dev > tol:
            report.add("init", "initial state must have trace 1", dev)
        return report


class SLHqMC:
    """State-labeled chain: an HqMC plus one label (a set of propositions)
    per state. Words live over the powerset of the propositions."""

    kind = "slhqmc"

    def __init__(self, chain: HqMC, ap: Iterable[str], label: Mapping[str, Iterable[str]]):
        if not isinstance(chain, HqMC):
            raise HqmcError("chain must be an HqMC")
        self.chain = chain
        props = []
        for p in ap:
            p = _check_name(str(p), "proposition")
            if any(c in p for c in _SET_CHARS):
                raise HqmcError(f"proposition {p!r} contains a reserved character")
            props.append(p)
        if len(set(props)) != len(props):
            raise HqmcError("atomic propositions must be unique")
        self.ap = tuple(sorted(props))
        apset = set(self.ap)
        lab = {}
        for s in chain.states:
            if s not in label:
                raise HqmcError(f"state {s!r} has no label; the labeling must be total")
            sym = canon_symbol(label[s])
            if isinstance(sym, str) or not set(sym) <= apset:
                raise HqmcError(f"label of {s!r} must be a subset of the atomic propositions")
            lab[s] = sym
        extra = set(label) - set(chain.states)
        if extra:
            raise HqmcError(f"labels given for unknown states {sorted(extra)!r}")
        self.label = lab

    @property
    def dim(self) -> int:
        return self.chain.dim

    @property
    def states(self) -> tuple[str, ...]:
        return self.chain.states

    @property
    def alphabet(self) -> tuple[tuple, ...]:
        return powerset_alphabet(self.ap)

    def validate(self, tol: float | None = None) -> ValidationReport:
        report = self.chain.validate(tol)
        report.kind = self.kind
        return report


# ---------------------------------------------------------------------------
# automata


_FASHIONS = ("classical", "quantum", "mixed")


class Fashion:
    """Acceptance fashion of a hybrid automaton.

    classical: accept by a set of classical states, full quantum trace.
    quantum:   accept by a projector on the Hilbert space, all states.
    mixed:     both filters at once.
    """

    __slots__ = ("kind", "accept", "p_acc")

    def __init__(self, kind: str, accept=None, p_acc=None):
        if kind not in _FASHIONS:
            raise HqmcError(f"unknown acceptance fashion {kind!r}")
        self.kind = kind
        if kind in ("classical", "mixed"):
            if accept is None:
                raise HqmcError(f"{kind} fashion needs an accepting state set")
            self.accept = frozenset(str(s) for s in accept)
        else:
            if accept is not None:
                raise HqmcError("quantum fashion takes no accepting state set")
            self.accept = None
        if kind in ("quantum", "mixed"):
            if p_acc is None:
                raise HqmcError(f"{kind} fashion needs an acceptance projector")
            self.p_acc = linalg.as_complex_matrix(p_acc, "p_acc")
            if self.p_acc.shape[0] != self.p_acc.shape[1]:
                raise DimensionError("p_acc must be square")
        else:
            if p_acc is not None:
                raise HqmcError("classical fashion takes no acceptance projector")
            self.p_acc = None

    @classmethod
    def classical(cls, accept) -> "Fashion":
        return cls("classical", accept=accept)

    @classmethod
    def quantum(cls, p_acc) -> "Fashion":
        return cls("quantum", p_acc=p_acc)

    @classmethod
    def mixed(cls, accept, p_acc) -> "Fashion":
        return cls("mixed", accept=accept, p_acc=p_acc)

    def __repr__(self) -> str:
        return f"Fashion({self.kind!r})"


class HQA:
    """Hybrid quantum automaton: one HqMC-style transition matrix per input
    symbol, a shared initial distribution, and an acceptance fashion."""

    kind = "hqa"

    def __init__(self, dim, states, alphabet, init, trans, fashion: Fashion,
                 tol: float | None = None):
        self.dim = _check_dim(dim)
        self.states = _check_states(states)
        syms = tuple(canon_symbol(a) for a in alphabet)
        if not syms:
            raise HqmcError("alphabet must be non-empty")
        if len(set(syms)) != len(syms):
            raise HqmcError("alphabet symbols must be unique")
        self.alphabet = syms
        symset = set(syms)
        tmap = {}
        for sym, entries in dict(trans).items():
            sym = canon_symbol(sym)
            if sym not in symset:
                raise HqmcError(f"transition for unknown symbol {symbol_str(sym)!r}")
            tmap[sym] = _ordered_trans(self.states, dict(entries), self.dim,
                                       f"transition[{symbol_str(sym)}]")
        self.trans = {sym: tmap.get(sym, {}) for sym in syms}
        self.init = _ordered_init(self.states, dict(init), self.dim)
        if not isinstance(fashion, Fashion):
            raise HqmcError("fashion must be a Fashion")
        if fashion.accept is not None and not fashion.accept <= set(self.states):
            raise HqmcError("accepting states must be a subset of the states")
        if fashion.p_acc is not None and fashion.p_acc.shape != (self.dim, self.dim):
            raise DimensionError(
                f"p_acc has shape {fashion.p_acc.shape}, expected ({self.dim}, {self.dim})"
            )
        self.fashion = fashion
        self.tol = None if tol is None else linalg.resolve_tol(tol)
        self._zero = QuantumOperation.zero(self.dim)

    def _tol(self, tol: float | None) -> float:
        if tol is not None:
            return linalg.resolve_tol(tol)
        if self.tol is not None:
            return self.tol
        return linalg.get_default_tol()

    def op(self, sym, t: str, s: str) -> QuantumOperation:
        sym = canon_symbol(sym)
        if sym not in set(self.alphabet):
            raise HqmcError(f"unknown symbol {symbol_str(sym)!r}")
        return self.trans[sym].get((t, s), self._zero)

    def validate(self, tol: float | None = None) -> ValidationReport:
        tol = self._tol(tol)
        report = ValidationReport(self.kind)
        i = np.eye(self.dim)
        for sym in self.alphabet:
            entries = self.trans[sym]
            for s in self.states:
                acc = np.zeros((self.dim, self.dim), dtype=np.complex128)
                for t in self.states:
                    op = entries.get((t, s))
                    if op is not None:
                        acc += op.completeness_sum()
                mag = linalg.max_abs(acc - i)
                if mag > tol:
                    report.add(
                        f"symbol {symbol_str(sym)}, column {s}",
                        "column must sum to a trace-preserving operation",
                        mag,
                    )
        _validate_init(report, self.init, tol)
        if self.fashion.p_acc is not None:
            _validate_projector(report, self.fashion.p_acc, "fashion.p_acc", tol)
        return report


class QA:
    """Quantum automaton: one trace-preserving operation per symbol, a single
    initial density matrix, and a projective acceptance measurement."""

    kind = "qa"

    def __init__(self, dim, alphabet, init, ops, p_acc, tol: float | None = None):
        self.dim = _check_dim(dim)
        syms = tuple(canon_symbol(a) for a in alphabet)
        if not syms:
            raise HqmcError("alphabet must be non-empty")
        if len(set(syms)) != len(syms):
            raise HqmcError("alphabet symbols must be unique")
        self.alphabet = syms
        omap = {}
        for sym, op in dict(ops).items():
            sym = canon_symbol(sym)
            if sym not in set(syms):
                raise HqmcError(f"operation for unknown symbol {symbol_str(sym)!r}")
            if not isinstance(op, QuantumOperation):
                raise HqmcError(f"operation for {symbol_str(sym)!r} is not a QuantumOperation")
            if op.dim != self.dim:
                raise DimensionError(
                    f"operation for {symbol_str(sym)!r} has dim {op.dim}, expected {self.dim}"
                )
            omap[sym] = op
        missing = [symbol_str(s) for s in syms if s not in omap]
        if missing:
            raise HqmcError(f"missing operations for symbols {missing!r}")
        self.ops = {sym: omap[sym] for sym in syms}
        self.init = linalg.as_complex_matrix(init, "init")
        if self.init.shape != (self.dim, self.dim):
            raise DimensionError(f"init has shape {self.init.shape}, expected square of {self.dim}")
        self.p_acc = linalg.as_complex_matrix(p_acc, "p_acc")
        if self.p_acc.shape != (self.dim, self.dim):
            raise DimensionError(f"p_acc has shape {self.p_acc.shape}, expected square of {self.dim}")
        self.tol = None if tol is None else linalg.resolve_tol(tol)

    def _tol(self, tol: float | None) -> float:
        if tol is not None:
            return linalg.resolve_tol(tol)
        if self.tol is not None:
            return self.tol
        return linalg.get_default_tol()

    def validate(self, tol: float | None = None) -> ValidationReport:
        tol = self._tol(tol)
        report = ValidationReport(self.kind)
        i = np.eye(self.dim)
        for sym, op in self.ops.items():
            mag = linalg.max_abs(op.completeness_sum() - i)
            if mag > tol:
                report.add(f"ops[{symbol_str(sym)}]",
                           "symbol operation must be trace-preserving", mag)
        herm, neg, _ = density_defects(self.init)
        if herm > tol:
            report.add("init", "initial state must be Hermitian", herm)
        if neg > tol:
            report.add("init", "initial state must be positive semidefinite", neg)
        dev = abs(_tr(self.init) - 1.0)
        if dev > tol:
            report.add("init", "initial state must have trace 1", dev)
        _validate_projector(report, self.p_acc, "p_acc", tol)
        return report


class BLM:
    """Bilinear machine over plain complex matrices: weight eta M_w pi."""

    kind = "blm"

    def __init__(self, n, alphabet, mats, pi, eta):
        self.n = int(n)
        if self.n < 1:
            raise DimensionError(f"state space size must be >= 1, got {n}")
        syms = tuple(canon_symbol(a) for a in alphabet)
        if not syms:
            raise HqmcError("alphabet must be non-empty")
        if len(set(syms)) != len(syms):
            raise HqmcError("alphabet symbols must be unique")
        self.alphabet = syms
        mmap = {}
        for sym, m in dict(mats).items():
            sym = canon_symbol(sym)
            if sym not in set(syms):
                raise HqmcError(f"matrix for unknown symbol {symbol_str(sym)!r}")
            a = linalg.as_complex_matrix(m, f"mats[{symbol_str(sym)}]")
            if a.shape != (self.n, self.n):
                raise DimensionError(
                    f"matrix for {symbol_str(sym)!r} has shape {a.shape}, expected ({n}, {n})"
                )
            mmap[sym] = a
        missing = [symbol_str(s) for s in syms if s not in mmap]
        if missing:
            raise HqmcError(f"missing matrices for symbols {missing!r}")
        self.mats = {sym: mmap[sym] for sym in syms}
        self.pi = linalg.as_complex_vector(pi, "pi")
        self.eta = linalg.as_complex_vector(eta, "eta")
        if self.pi.shape != (self.n,) or self.eta.shape != (self.n,):
            raise DimensionError(
                f"pi and eta must have length {self.n}, got {self.pi.shape} and {self.eta.shape}"
            )

    def validate(self, tol: float | None = None) -> ValidationReport:
        # all constraints are structural and enforced at construction
        return ValidationReport(self.kind)


class Dfa:
    """Total deterministic finite automaton over label-set symbols."""

    kind = "dfa"

    def __init__(self, states, alphabet, delta, q0, accepting):
        self.states = _check_states(states)
        syms = []
        for a in alphabet:
            sym = canon_symbol(a)
            if isinstance(sym, str):
                raise HqmcError("DFA symbols must be label sets, not plain strings")
            syms.append(sym)
        if not syms:
            raise HqmcError("alphabet must be non-empty")
        if len(set(syms)) != len(syms):
            raise HqmcError("alphabet symbols must be unique")
        self.alphabet = tuple(syms)
        sset, symset = set(self.states), set(self.alphabet)
        dmap = {}
        for (q, sym), q2 in dict(delta).items():
            sym = canon_symbol(sym)
            if q not in sset or q2 not in sset:
                raise HqmcError(f"transition ({q!r}, {symbol_str(sym)!r}) -> {q2!r} names an unknown state")
            if sym not in symset:
                raise HqmcError(f"transition on unknown symbol {symbol_str(sym)!r}")
            dmap[(q, sym)] = q2
        self.delta = dmap
        if q0 not in sset:
            raise HqmcError(f"initial state {q0!r} is not a state")
        self.q0 = q0
        acc = frozenset(str(s) for s in accepting)
        if not acc <= sset:
            raise HqmcError("accepting states must be a subset of the states")
        self.accepting = acc

    def step(self, q: str, sym) -> str:
        sym = canon_symbol(sym)
        nxt = self.delta.get((q, sym))
        if nxt is None:
            raise HqmcError(f"DFA is not total: no transition from {q!r} on {symbol_str(sym)!r}")
        return nxt

    def validate(self, tol: float | None = None) -> ValidationReport:
        report = ValidationReport(self.kind)
        for q in self.states:
            for sym in self.alphabet:
                if (q, sym) not in self.delta:
                    report.add(f"delta[{q}|{symbol_str(sym)}]",
                               "transition function must be total", 1.0)
        return report


# ---------------------------------------------------------------------------
# semantics


def _zero_dist(states, dim) -> dict[str, np.ndarray]:
    return {s: np.zeros((dim, dim), dtype=np.complex128) for s in states}


def _apply_trans(states, trans, mu, dim) -> dict[str, np.ndarray]:
    """One step of a sparse transition map on a state-indexed distribution."""
    out = _zero_dist(states, dim)
    for (t, s), op in trans.items():
        x = mu.get(s)
        if x is None:
            continue
        out[t] = out[t] + op.apply(x)
    return out


def _check_dist(m_states, dim, mu) -> dict[str, np.ndarray]:
    sset = set(m_states)
    out = {}
    for s, x in mu.items():
        if s not in sset:
            raise HqmcError(f"distribution names an unknown state {s!r}")
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (dim, dim):
            raise DimensionError(f"distribution entry {s!r} has shape {x.shape}, expected ({dim}, {dim})")
        out[s] = x
    return out


def hqmc_step(m: HqMC, mu: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
    """One step: out(t) = sum_s M(t, s) applied to mu(s)."""
    mu = _check_dist(m.states, m.dim, mu)
    return _apply_trans(m.states, m.trans, mu, m.dim)


def qmc_step(m: QMC, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (m.dim, m.dim):
        raise DimensionError(f"state has shape {rho.shape}, expected ({m.dim}, {m.dim})")
    return m.op.apply(rho)


def _word(alphabet, w) -> list:
    symset = set(alphabet)
    out = []
    for sym in w:
        sym = canon_symbol(sym)
        if sym not in symset:
            raise HqmcError(f"unknown symbol {symbol_str(sym)!r} in word")
        out.append(sym)
    return out


def hqa_distribution(a: HQA, w) -> dict[str, np.ndarray]:
    """Distribution after reading the word, starting from the initial one."""
    w = _word(a.alphabet, w)
    zero = np.zeros((a.dim, a.dim), dtype=np.complex128)
    mu = {s: np.array(a.init.get(s, zero)) for s in a.states}
    for sym in w:
        mu = _apply_trans(a.states, a.trans[sym], mu, a.dim)
    return mu


def hqa_accept_prob(a: HQA, w) -> float:
    """Acceptance probability of a word under the automaton's fashion.

    The empty word is read against the unchanged initial distribution.
    """
    mu = hqa_distribution(a, w)
    f = a.fashion
    if f.kind == "classical":
        return float(sum(_tr(mu[s]) for s in f.accept))
    if f.kind == "quantum":
        return float(sum(_tr(f.p_acc @ mu[s]) for s in a.states))
    return float(sum(_tr(f.p_acc @ mu[s]) for s in f.accept))


def qa_accept_prob(a: QA, w) -> float:
    """Tr(P_acc E_w(rho0)) with the symbol operations applied left to right."""
    w = _word(a.alphabet, w)
    rho = np.array(a.init)
    for sym in w:
        rho = a.ops[sym].apply(rho)
    return _tr(a.p_acc @ rho)


def blm_weight(a: BLM, w) -> complex:
    """eta M_wk ... M_w1 pi; the empty word gives eta pi."""
    w = _word(a.alphabet, w)
    v = np.array(a.pi)
    for sym in w:
        v = a.mats[sym] @ v
    return complex(np.dot(a.eta, v))


def sl_trace_prob(m: SLHqMC, w) -> float:
    """Probability that a labeled chain traces the word w.

    Brute-force reference semantics: enumerate every state sequence whose
    labels spell w, push the initial mass of the first state through the
    edge operations, and add up the traces. Exponential in |w| by design;
    this is the oracle the fast paths are tested against.
    """
    w = [canon_symbol(sym) for sym in w]
    if not w:
        raise HqmcError("trace probabilities are defined for non-empty words only")
    symset = set(m.alphabet)
    for sym in w:
        if sym not in symset:
            raise HqmcError(f"unknown symbol {symbol_str(sym)!r} in word")
    chain = m.chain
    layers = [[s for s in m.states if m.label[s] == sym] for sym in w]
    total = 0.0
    for seq in itertools.product(*layers):
        rho = chain.init.get(seq[0])
        if rho is None:
            continue
        alive = True
        for prev, cur in zip(seq, seq[1:]):
            op = chain.trans.get((cur, prev))
            if op is None:
                alive = False
                break
            rho = op.apply(rho)
        if alive:
            total += _tr(rho)
    return total
