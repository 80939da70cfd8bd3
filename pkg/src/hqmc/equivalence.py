"""Equivalence checking for bilinear machines and everything above them.

Two machines with weight functions P1 and P2 are equivalent when
P1(w) == P2(w) for every word w; for labeled chains the words range over
non-empty label sequences only, so the check comes in two modes:

    "eps"   compare on all words including the empty one
    "plus"  compare on non-empty words only

The core algorithm explores the reachable joint space of the stacked
machine. It keeps a FIFO queue of raw stacked vectors (M_w pi1; M_w pi2)
and an orthonormal basis of the span seen so far. For each dequeued vector
and each symbol it compares the two weights, then extends the basis with
the orthogonal residual when that residual is numerically nonzero. Since
the span can only grow n1 + n2 times, the loop terminates after exploring
at most that many vectors per symbol, which also shows that inequivalent
machines differ on some word of length < n1 + n2.

Floating point replaces exact arithmetic, so every zero test is "within
tol" and each verdict carries the largest weight difference it tolerated
(margin); a near-threshold decision is therefore visible to the caller.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import HqmcError
from .models import BLM, HQA, SLHqMC, Symbol
from .transforms import hqa_to_qa, qa_to_blm, sl_to_chqa

MODES = ("eps", "plus")

# a residual this small relative to the input is recomputed once more
# against the basis before use, to keep the basis orthonormal
_REORTH_FACTOR = 1e-4


@dataclass
class EquivalenceVerdict:
    """Outcome of an equivalence check.

    witness is None when equivalent, else a word on which the weights
    differ ([] means the empty word). margin is the decisive weight
    difference for a negative verdict and the largest accepted difference
    for a positive one, so threshold-hugging runs can be audited.
    """

    equivalent: bool
    witness: list | None
    basis_size: int
    words_explored: int
    margin: float

    def to_json(self) -> dict:
        witness = None
        if self.witness is not None:
            witness = [list(sym) if isinstance(sym, tuple) else sym for sym in self.witness]
        return {
            "equivalent": self.equivalent,
            "witness": witness,
            "basis_size": self.basis_size,
            "words_explored": self.words_explored,
            "margin": self.margin,
        }


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise HqmcError(f"unknown mode {mode!r}, expected one of {MODES}")
    return mode


def _check_pair(a1: BLM, a2: BLM) -> None:
    if a1.alphabet != a2.alphabet:
        raise HqmcError(
            f"alphabets differ: {[str(s) for s in a1.alphabet]} vs {[str(s) for s in a2.alphabet]}"
        )


def blm_equivalent(a1: BLM, a2: BLM, tol: float | None = None, mode: str = "eps") -> EquivalenceVerdict:
    """Decide weight equality on all words ("eps") or non-empty words ("plus").

    Runs in O(|alphabet| (n1+n2)^3) arithmetic: the basis never exceeds
    n1 + n2 vectors and each candidate costs one matrix-vector product per
    machine plus one orthogonalization pass.
    """
    _check_pair(a1, a2)
    _check_mode(mode)
    tol = linalg.resolve_tol(tol)
    n1, n2 = a1.n, a2.n
    cap = n1 + n2
    margin = 0.0
    explored = 0

    def diff(v1, v2) -> float:
        return abs(complex(np.dot(a1.eta, v1)) - complex(np.dot(a2.eta, v2)))

    if mode == "eps":
        explored += 1
        d0 = diff(a1.pi, a2.pi)
        if d0 > tol:
            return EquivalenceVerdict(False, [], 0, explored, d0)
        margin = max(margin, d0)

    stacked = np.concatenate([a1.pi, a2.pi])
    if float(np.linalg.norm(stacked)) <= tol:
        return EquivalenceVerdict(True, None, 0, explored, margin)

    basis = [stacked / np.linalg.norm(stacked)]
    queue = deque([(a1.pi, a2.pi, ())])
    while queue:
        v1, v2, word = queue.popleft()
        for sym in a1.alphabet:
            u1 = a1.mats[sym] @ v1
            u2 = a2.mats[sym] @ v2
            explored += 1
            d = diff(u1, u2)
            if d > tol:
                return EquivalenceVerdict(False, list(word) + [sym], len(basis), explored, d)
            margin = max(margin, d)
            u = np.concatenate([u1, u2])
            r, nrm = linalg.gram_schmidt_residual(u, basis)
            if nrm < _REORTH_FACTOR * float(np.linalg.norm(u)):
                r, nrm = linalg.gram_schmidt_residual(r, basis)
            if nrm > tol:
                if len(basis) >= cap:
                    raise HqmcError(
                        "internal error: basis grew past the joint dimension"
                    )
                basis.append(r / nrm)
                queue.append((u1, u2, word + (sym,)))
    return EquivalenceVerdict(True, None, len(basis), explored, margin)


def blm_k_equivalent_bruteforce(
    a1: BLM,
    a2: BLM,
    k: int,
    tol: float | None = None,
    mode: str = "eps",
    max_words: int = 2_000_000,
) -> EquivalenceVerdict:
    """Exhaustive weight comparison on every word of length at most k.

    Independent reference for blm_equivalent: no basis, no residuals, just
    breadth-first evaluation in length-then-lexicographic order (alphabet
    order as declared), returning the first counterexample found. Word
    count grows as |alphabet|^k and is capped by max_words.
    """
    _check_pair(a1, a2)
    _check_mode(mode)
    if k < 0:
        raise HqmcError(f"word length bound must be >= 0, got {k}")
    tol = linalg.resolve_tol(tol)
    width = len(a1.alphabet)
    total = 0
    size = 1
    for _ in range(k + 1):
        total += size
        if total > max_words:
            raise HqmcError(
                f"brute-force enumeration needs more than max_words={max_words} words"
            )
        size *= width

    margin = 0.0
    explored = 0

    def diff(v1, v2) -> float:
        return abs(complex(np.dot(a1.eta, v1)) - complex(np.dot(a2.eta, v2)))

    if mode == "eps":
        explored += 1
        d0 = diff(a1.pi, a2.pi)
        if d0 > tol:
            return EquivalenceVerdict(False, [], 0, explored, d0)
        margin = max(margin, d0)

    queue = deque([((), a1.pi, a2.pi)])
    while queue:
        word, v1, v2 = queue.popleft()
        if len(word) == k:
            continue
        for sym in a1.alphabet:
            u1 = a1.mats[sym] @ v1
            u2 = a2.mats[sym] @ v2
            explored += 1
            d = diff(u1, u2)
            if d > tol:
                return EquivalenceVerdict(False, list(word) + [sym], 0, explored, d)
            margin = max(margin, d)
            queue.append((word + (sym,), u1, u2))
    return EquivalenceVerdict(True, None, 0, explored, margin)


def hqa_equivalent(a1: HQA, a2: HQA, tol: float | None = None, mode: str = "eps") -> EquivalenceVerdict:
    """Acceptance equivalence of two hybrid automata over one alphabet.

    Both automata are folded and vectorized, then compared as bilinear
    machines; with n_i = dim(H_i) and k_i classical states the joint
    dimension is (n1 k1)^2 + (n2 k2)^2, so inequivalence always shows up on
    a word shorter than that.
    """
    if tuple(a1.alphabet) != tuple(a2.alphabet):
        raise HqmcError("the automata must share one alphabet (same symbols, same order)")
    b1 = qa_to_blm(hqa_to_qa(a1))
    b2 = qa_to_blm(hqa_to_qa(a2))
    return blm_equivalent(b1, b2, tol=tol, mode=mode)


def sl_trace_equivalent(m1: SLHqMC, m2: SLHqMC, tol: float | None = None) -> EquivalenceVerdict:
    """Trace equivalence of two labeled chains over the same propositions.

    Trace probabilities are defined on non-empty words only, so the
    comparison always runs in "plus" mode. A witness, when present, is a
    sequence of label sets.
    """
    if set(m1.ap) != set(m2.ap):
        raise HqmcError(f"proposition sets differ: {list(m1.ap)} vs {list(m2.ap)}")
    b1 = qa_to_blm(hqa_to_qa(sl_to_chqa(m1)))
    b2 = qa_to_blm(hqa_to_qa(sl_to_chqa(m2)))
    return blm_equivalent(b1, b2, tol=tol, mode="plus")
