"""Regenerate the JSON fixtures in this directory.

Every fixture is deterministic (no randomness), so rerunning this script
reproduces the committed files byte for byte.

Usage: python3 fixtures/generate.py
"""

import math
from pathlib import Path

import numpy as np

from hqmc.formats import save_model
from hqmc.models import BLM, Dfa, Fashion, HQA, HqMC, SLHqMC
from hqmc.operations import QuantumOperation

HERE = Path(__file__).resolve().parent

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)
IDENT = QuantumOperation.identity(2)


def damping_hqmc() -> HqMC:
    """Three-state chain: measure in the computational basis, then decay.

    From s0 a projective measurement routes |0> mass to s1 (absorbing) and
    |1> mass to s2.  At s2 an amplitude-damping channel with rate 1/2 is
    split across two edges: the no-decay branch loops on s2, the decay
    branch moves to s1.
    """
    g = 0.5
    k_stay = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - g)]], dtype=complex)
    k_decay = np.array([[0.0, math.sqrt(g)], [0.0, 0.0]], dtype=complex)
    trans = {
        ("s1", "s0"): QuantumOperation([P0]),
        ("s2", "s0"): QuantumOperation([P1]),
        ("s2", "s2"): QuantumOperation([k_stay]),
        ("s1", "s2"): QuantumOperation([k_decay]),
        ("s1", "s1"): IDENT,
    }
    return HqMC(2, ["s0", "s1", "s2"], trans, {"s0": PLUS})


def orthogonal_path_hqmc() -> HqMC:
    """Four-state chain whose only path to s3 composes orthogonal projectors.

    The underlying graph reaches s3 from s0 (via s2), but the path operator
    is the zero map: the s0->s2 edge projects onto |0> while the s2->s3 edge
    projects onto |1>.  Reachability of s3 is therefore 0 even though a
    graph path exists.
    """
    trans = {
        ("s1", "s0"): QuantumOperation([P1]),
        ("s2", "s0"): QuantumOperation([P0]),
        ("s1", "s2"): QuantumOperation([P0]),
        ("s3", "s2"): QuantumOperation([P1]),
        ("s1", "s1"): IDENT,
        ("s3", "s3"): IDENT,
    }
    return HqMC(2, ["s0", "s1", "s2", "s3"], trans, {"s0": PLUS})


def uniform_branch_hqmc() -> HqMC:
    """Same graph as orthogonal_path_hqmc but with fair classical branching.

    Each branching edge carries the single Kraus matrix I/sqrt(2), so the
    chain behaves like a classical random walk: s3 is reached with
    probability 1/4 from s0.
    """
    half = QuantumOperation([np.eye(2, dtype=complex) / math.sqrt(2.0)])
    trans = {
        ("s1", "s0"): half,
        ("s2", "s0"): half,
        ("s1", "s2"): half,
        ("s3", "s2"): half,
        ("s1", "s1"): IDENT,
        ("s3", "s3"): IDENT,
    }
    return HqMC(2, ["s0", "s1", "s2", "s3"], trans, {"s0": PLUS})


def _label_bad(chain: HqMC) -> SLHqMC:
    label = {s: ["bad"] if s == "s3" else [] for s in chain.states}
    return SLHqMC(chain, ["bad"], label)


def dfa_bad_seen() -> Dfa:
    """Accepts exactly the words in which the letter {bad} occurs."""
    return Dfa(
        ["watch", "seen"],
        [(), ("bad",)],
        {
            ("watch", ()): "watch",
            ("watch", ("bad",)): "seen",
            ("seen", ()): "seen",
            ("seen", ("bad",)): "seen",
        },
        "watch",
        ["seen"],
    )


def dfa_never() -> Dfa:
    """Rejects every word (no accepting states)."""
    return Dfa(
        ["only"],
        [(), ("bad",)],
        {("only", ()): "only", ("only", ("bad",)): "only"},
        "only",
        [],
    )


# shared transition probabilities for the stochastic pair, [target][source]
_STOCH = {
    "a": np.array([[0.5, 0.0], [0.5, 1.0]]),
    "b": np.array([[1.0, 0.3], [0.0, 0.7]]),
}


def stochastic_chqa() -> HQA:
    """Probabilistic automaton embedded as a classical HQA on a trivial space.

    Hilbert dimension 1, so each edge operation is the single 1x1 Kraus
    matrix [sqrt(p)] and column completeness is exactly column stochasticity.
    """
    states = ["u0", "u1"]
    trans = {sym: {} for sym in _STOCH}
    for sym, p in _STOCH.items():
        for ti, t in enumerate(states):
            for si, s in enumerate(states):
                if p[ti, si] > 0.0:
                    k = np.array([[math.sqrt(p[ti, si])]], dtype=complex)
                    trans[sym][(t, s)] = QuantumOperation([k])
    init = {"u0": np.array([[0.8]], dtype=complex), "u1": np.array([[0.2]], dtype=complex)}
    return HQA(1, states, ["a", "b"], init, trans, Fashion.classical(["u1"]))


def stochastic_blm() -> BLM:
    """The same probabilistic automaton written directly as a 2-state BLM."""
    mats = {sym: p.astype(complex) for sym, p in _STOCH.items()}
    pi = np.array([0.8, 0.2], dtype=complex)
    eta = np.array([0.0, 1.0], dtype=complex)
    return BLM(2, ["a", "b"], mats, pi, eta)


def invalid_hqmc() -> HqMC:
    # column s0 sums to I/2, deliberately violating completeness
    half = QuantumOperation([np.eye(2, dtype=complex) / math.sqrt(2.0)])
    trans = {("s1", "s0"): half, ("s1", "s1"): IDENT}
    return HqMC(2, ["s0", "s1"], trans, {"s0": PLUS})


def main() -> None:
    fixtures = {
        "damping_hqmc.json": damping_hqmc(),
        "orthogonal_path_hqmc.json": orthogonal_path_hqmc(),
        "uniform_branch_hqmc.json": uniform_branch_hqmc(),
        "orthogonal_path_slhqmc.json": _label_bad(orthogonal_path_hqmc()),
        "uniform_branch_slhqmc.json": _label_bad(uniform_branch_hqmc()),
        "dfa_bad_seen.json": dfa_bad_seen(),
        "dfa_never.json": dfa_never(),
        "stochastic_chqa.json": stochastic_chqa(),
        "stochastic_blm.json": stochastic_blm(),
        "invalid_hqmc.json": invalid_hqmc(),
    }
    for name, model in fixtures.items():
        save_model(model, HERE / name)
        print("wrote", name)


if __name__ == "__main__":
    main()
