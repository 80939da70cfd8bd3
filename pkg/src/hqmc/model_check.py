"""Path measures and safety model checking on hybrid chains.

A set of infinite runs is measured not by one number but by a
super-operator: pushing an initial density matrix through it and taking
the trace gives the probability of the event when the chain starts in that
density matrix. Super-operators are carried as their matrices on
row-stacked vectors (dim^2 by dim^2), where composition is a plain matrix
product.

reach_measure computes the measure of "eventually hit the target set" as
the least fixpoint of

    R_s = identity                      for s in the target,
    R_s = sum_t R_t * Mhat(t, s)        otherwise,

where Mhat(t, s) is the superoperator matrix of the edge operation. The
recursion counts first-passage paths once because target rows are pinned,
which is the same as cutting the targets' outgoing edges. Two solvers are
available: a direct linear solve of the stacked system (attempted when the
system is modest in size and its condition estimate is sound) and Kleene
iteration from zero, which is the semantic ground truth and the fallback.
Iteration stops when the largest entrywise change drops below tol; if
max_iter arrives first, the result is returned with its residual so the
caller can see how far convergence got. No extrapolation is applied.

check_safety reduces "the trace never matches the bad-prefix automaton" to
reachability of accepting product states and returns, per chain state, the
complementary pair of measures (satisfy, violate) with
satisfy = identity - violate.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimensionError, HqmcError
from .models import Dfa, HqMC, SLHqMC
from .transforms import ACCEPT_PROP, product, product_state_name

# direct solve is attempted only below this stacked-system dimension
_DIRECT_SIZE_CAP = 2048
_COND_LIMIT = 1e12

DEFAULT_REACH_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000


@dataclass
class PathMeasure:
    """Super-operator valued measure, stored as its matrix on vec(rho)."""

    dim: int
    matrix_rep: np.ndarray

    @classmethod
    def identity(cls, dim: int) -> "PathMeasure":
        return cls(dim, np.eye(dim * dim, dtype=np.complex128))

    @classmethod
    def zero(cls, dim: int) -> "PathMeasure":
        return cls(dim, np.zeros((dim * dim, dim * dim), dtype=np.complex128))

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=np.complex128)
        if rho.shape != (self.dim, self.dim):
            raise DimensionError(f"state has shape {rho.shape}, expected ({self.dim}, {self.dim})")
        return linalg.unvec(self.matrix_rep @ linalg.vec(rho))

    def trace_on(self, rho) -> float:
        """Probability assigned to rho: Tr of the pushed-through state."""
        return float(np.trace(self.apply(rho)).real)

    def complement(self) -> "PathMeasure":
        return PathMeasure(self.dim, np.eye(self.dim * self.dim) - self.matrix_rep)

    def completeness_matrix(self) -> np.ndarray:
        """The matrix C with Tr(measure(rho)) = Tr(C rho) for all rho."""
        i = np.eye(self.dim, dtype=np.complex128)
        return linalg.unvec(self.matrix_rep.T @ linalg.vec(i)).T

    def is_trace_nonincreasing(self, tol: float | None = None) -> bool:
        i = np.eye(self.dim)
        return linalg.is_positive_semidefinite(i - self.completeness_matrix(), tol)


def path_superop(m: HqMC, path) -> PathMeasure:
    """Accumulated operation along an explicit state path.

    The product runs in path order (later edges multiply on the left); a
    single-state path gives the identity, and any missing edge collapses
    the whole measure to zero.
    """
    path = [str(s) for s in path]
    if not path:
        raise HqmcError("a path needs at least one state")
    sset = set(m.states)
    for s in path:
        if s not in sset:
            raise HqmcError(f"unknown state {s!r} in path")
    d2 = m.dim * m.dim
    acc = np.eye(d2, dtype=np.complex128)
    for prev, cur in zip(path, path[1:]):
        op = m.trans.get((cur, prev))
        if op is None:
            return PathMeasure.zero(m.dim)
        acc = op.superop_matrix() @ acc
    return PathMeasure(m.dim, acc)


def cylinder_measure(m: HqMC, s: str, prefix, rho) -> float:
    """Probability of the cylinder of runs from s extending the prefix."""
    prefix = [str(p) for p in prefix]
    if not prefix or prefix[0] != str(s):
        raise HqmcError("the prefix must start at the given state")
    return path_superop(m, prefix).trace_on(rho)


@dataclass
class ReachResult:
    measures: dict[str, PathMeasure]
    residual: float
    iterations: int
    method: str
    residual_history: list[float] = field(default_factory=list)


def _superops(m: HqMC, tol: float) -> dict[tuple[str, str], np.ndarray]:
    out = {}
    for (t, s), op in m.trans.items():
        if not op.is_zero(tol):
            out[(t, s)] = op.superop_matrix()
    return out


def _states_reaching(m: HqMC, sup, target: set[str]) -> set[str]:
    """States with an underlying graph path into the target (targets included)."""
    incoming: dict[str, list[str]] = {s: [] for s in m.states}
    for (t, s) in sup:
        incoming[t].append(s)
    seen = set(target)
    frontier = deque(target)
    while frontier:
        u = frontier.popleft()
        for s in incoming[u]:
            if s not in seen:
                seen.add(s)
                frontier.append(s)
    return seen


def reach_measure(
    m: HqMC,
    target,
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
    method: str = "auto",
) -> ReachResult:
    """Least-fixpoint measure of eventually reaching the target set.

    method "auto" tries the direct solve first and falls back to Kleene
    iteration; "direct" and "kleene" force one solver. States with no
    underlying graph path into the target get the zero measure up front;
    that pruning is sound because every accumulated operation along their
    paths contains a missing edge. No pruning happens in the other
    direction: a graph path does not imply nonzero measure.
    """
    tol = DEFAULT_REACH_TOL if tol is None else linalg.resolve_tol(tol)
    if method not in ("auto", "direct", "kleene"):
        raise HqmcError(f"unknown method {method!r}")
    if max_iter < 1:
        raise HqmcError(f"max_iter must be >= 1, got {max_iter}")
    target = {str(s) for s in target}
    unknown = target - set(m.states)
    if unknown:
        raise HqmcError(f"target names unknown states {sorted(unknown)!r}")

    d = m.dim
    d2 = d * d
    sup = _superops(m, m._tol(None))
    reaching = _states_reaching(m, sup, target)

    measures: dict[str, PathMeasure] = {}
    for s in m.states:
        if s in target:
            measures[s] = PathMeasure.identity(d)
        elif s not in reaching:
            measures[s] = PathMeasure.zero(d)
    active = [s for s in m.states if s in reaching and s not in target]
    if not active:
        # nothing to solve; echo a forced method so callers can rely on it
        return ReachResult(measures, 0.0, 0, "kleene" if method == "kleene" else "direct", [])

    const: dict[str, np.ndarray] = {}
    coupling: dict[str, list[tuple[str, np.ndarray]]] = {}
    for s in active:
        c = np.zeros((d2, d2), dtype=np.complex128)
        links = []
        for t in m.states:
            mat = sup.get((t, s))
            if mat is None:
                continue
            if t in target:
                c = c + mat
            elif t in reaching:
                links.append((t, mat))
        const[s] = c
        coupling[s] = links

    def fixpoint_residual(r: dict[str, np.ndarray]) -> float:
        worst = 0.0
        for s in active:
            rhs = const[s].copy()
            for t, mat in coupling[s]:
                rhs += r[t] @ mat
            worst = max(worst, linalg.max_abs(r[s] - rhs))
        return worst

    big = len(active) * d2 * d2
    if method in ("auto", "direct"):
        if big > _DIRECT_SIZE_CAP:
            if method == "direct":
                raise HqmcError(
                    f"direct solve refused: stacked system of dimension {big} "
                    f"exceeds the cap of {_DIRECT_SIZE_CAP}"
                )
        else:
            index = {s: i for i, s in enumerate(active)}
            block = d2 * d2
            a = np.eye(big, dtype=np.complex128)
            b = np.zeros(big, dtype=np.complex128)
            eye2 = np.eye(d2, dtype=np.complex128)
            for s in active:
                i = index[s]
                b[i * block:(i + 1) * block] = linalg.vec(const[s])
                for t, mat in coupling[s]:
                    j = index[t]
                    a[i * block:(i + 1) * block, j * block:(j + 1) * block] -= np.kron(eye2, mat.T)
            cond = np.linalg.cond(a)
            if cond < _COND_LIMIT:
                x = np.linalg.solve(a, b)
                sol = {
                    s: linalg.unvec(x[index[s] * block:(index[s] + 1) * block])
                    for s in active
                }
                res = fixpoint_residual(sol)
                for s in active:
                    measures[s] = PathMeasure(d, sol[s])
                return ReachResult(measures, res, 0, "direct", [])
            if method == "direct":
                raise HqmcError(
                    f"direct solve refused: condition estimate {cond:.3e} "
                    f"exceeds {_COND_LIMIT:.0e}"
                )

    # Kleene iteration from zero; each sweep uses the previous sweep's
    # values only, so the iterates are exactly the truncated first-passage
    # path sums and grow monotonically in trace.
    current = {s: np.zeros((d2, d2), dtype=np.complex128) for s in active}
    history: list[float] = []
    for _ in range(max_iter):
        nxt = {}
        delta = 0.0
        for s in active:
            acc = const[s].copy()
            for t, mat in coupling[s]:
                acc += current[t] @ mat
            nxt[s] = acc
            delta = max(delta, linalg.max_abs(acc - current[s]))
        current = nxt
        history.append(delta)
        if delta <= tol:
            break
    for s in active:
        measures[s] = PathMeasure(d, current[s])
    return ReachResult(measures, history[-1], len(history), "kleene", history)


@dataclass
class SafetyResult:
    """Per-state decomposition of runs into safe and violating parts.

    per_state maps each chain state to (satisfy, violate) with
    satisfy = identity - violate exactly. probability_by_state evaluates
    every state's satisfy measure on the one supplied density matrix;
    probability_satisfy is that number for the requested state.
    """

    state: str
    product_state: str | None
    probability_satisfy: float
    per_state: dict[str, tuple[PathMeasure, PathMeasure]]
    probability_by_state: dict[str, float]
    residual: float
    iterations: int
    method: str
    degenerate: bool = False
    residual_history: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "state": self.state,
            "probability_satisfy": self.probability_satisfy,
            "residual": self.residual,
            "iterations": self.iterations,
            "method": self.method,
        }
        if self.degenerate:
            out["degenerate"] = True
        return out


def check_safety(
    m: SLHqMC,
    dfa: Dfa,
    s: str,
    rho=None,
    tol: float | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
    method: str = "auto",
) -> SafetyResult:
    """Probability that the trace from state s never matches the DFA.

    The DFA reads label sets and flags bad prefixes by accepting states.
    Runs whose trace has an accepted prefix violate the property; the
    violation measure of s is the reachability measure of accepting
    product states from (s, delta(q0, L(s))), and the satisfaction measure
    is its complement.

    rho defaults to the chain's initial mass at s normalized to trace 1,
    or the maximally mixed state when s carries no initial mass.

    A DFA accepting the empty word is degenerate: every run violates
    immediately, the probability is 0, and no fixpoint is computed.
    """
    if not isinstance(m, SLHqMC):
        raise HqmcError("safety checking needs a labeled chain")
    s = str(s)
    if s not in set(m.states):
        raise HqmcError(f"unknown state {s!r}")
    if rho is None:
        init = m.chain.init.get(s)
        tr = 0.0 if init is None else float(np.trace(init).real)
        if tr > linalg.resolve_tol(None):
            rho = np.asarray(init) / tr
        else:
            rho = np.eye(m.dim, dtype=np.complex128) / m.dim
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (m.dim, m.dim):
        raise DimensionError(f"rho has shape {rho.shape}, expected ({m.dim}, {m.dim})")

    if dfa.q0 in dfa.accepting:
        per_state = {
            t: (PathMeasure.zero(m.dim), PathMeasure.identity(m.dim)) for t in m.states
        }
        by_state = {t: 0.0 for t in m.states}
        return SafetyResult(
            state=s,
            product_state=None,
            probability_satisfy=0.0,
            per_state=per_state,
            probability_by_state=by_state,
            residual=0.0,
            iterations=0,
            method="degenerate",
            degenerate=True,
        )

    prod = product(m, dfa)
    target = [ps for ps in prod.states if prod.label[ps] == (ACCEPT_PROP,)]
    reach = reach_measure(prod.chain, target, tol=tol, max_iter=max_iter, method=method)

    per_state: dict[str, tuple[PathMeasure, PathMeasure]] = {}
    by_state: dict[str, float] = {}
    for t in m.states:
        q = dfa.step(dfa.q0, m.label[t])
        violate = reach.measures[product_state_name(t, q)]
        satisfy = violate.complement()
        per_state[t] = (satisfy, violate)
        by_state[t] = satisfy.trace_on(rho)
    return SafetyResult(
        state=s,
        product_state=product_state_name(s, dfa.step(dfa.q0, m.label[s])),
        probability_satisfy=by_state[s],
        per_state=per_state,
        probability_by_state=by_state,
        residual=reach.residual,
        iterations=reach.iterations,
        method=reach.method,
        residual_history=reach.residual_history,
    )
