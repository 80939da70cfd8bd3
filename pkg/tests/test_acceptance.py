"""Acceptance suite: one test per advertised guarantee, one printed verdict
line each (run with pytest -s to see them).

Every test checks a library result against an independent computation: a
definitional oracle, an exhaustive enumeration, or a closed-form value.
"""

import itertools
import time

import numpy as np

from hqmc import linalg
from hqmc.equivalence import blm_equivalent, blm_k_equivalent_bruteforce, hqa_equivalent
from hqmc.model_check import check_safety, cylinder_measure, reach_measure
from hqmc.models import (
    Dfa,
    HqMC,
    SLHqMC,
    blm_weight,
    hqa_accept_prob,
    hqmc_step,
    qa_accept_prob,
    qmc_step,
    sl_trace_prob,
)
from hqmc.operations import QuantumOperation, op_compose, op_sum
from hqmc.transforms import hqa_to_qa, hqmc_to_qmc, qa_to_blm, sl_to_chqa

from _gen import (
    all_words,
    random_blm,
    random_density,
    random_hqa,
    random_hqmc,
    random_slhqmc,
    unitarily_similar_blm,
    perturbed_blm,
)

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)
IDENT = QuantumOperation.identity(2)


def report(name: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


def embed_blocks(mu, states, dim):
    n = len(states)
    out = np.zeros((n * dim, n * dim), dtype=complex)
    for i, s in enumerate(states):
        lo = i * dim
        out[lo:lo + dim, lo:lo + dim] = mu[s]
    return out


def test_folding_correspondence():
    """Folded chain states equal the block-diagonal embedding of the hybrid
    distribution at every step."""
    rng = np.random.default_rng(100)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 4))
        m = random_hqmc(rng, n, 2)
        q = hqmc_to_qmc(m)
        mu = m.initial_distribution()
        rho = np.array(q.init)
        for _ in range(6):
            want = embed_blocks(mu, m.states, 2)
            worst = max(worst, linalg.max_abs(rho - want))
            mu = hqmc_step(m, mu)
            rho = qmc_step(q, rho)
    elapsed = time.perf_counter() - t0
    report("folding correspondence", worst <= 1e-9 and elapsed < 10.0,
           f"50 chains, steps 0..5, worst |diff| {worst:.2e}, {elapsed:.1f}s")


def test_automaton_weight_pipeline():
    """Automaton acceptance survives the channel and bilinear reductions."""
    rng = np.random.default_rng(101)
    worst = 0.0
    count = 0
    for kind in ("classical", "quantum", "mixed"):
        for _ in range(50):
            a = random_hqa(rng, int(rng.integers(1, 3)), 2, ("a", "b"), kind)
            q = hqa_to_qa(a)
            b = qa_to_blm(q)
            for w in all_words(("a", "b"), 4):
                p = hqa_accept_prob(a, w)
                pq = qa_accept_prob(q, w)
                pb = blm_weight(b, w)
                worst = max(worst, abs(p - pq), abs(pq - pb), abs(complex(pb).imag))
            count += 1
    report("automaton weight pipeline", worst <= 1e-9,
           f"{count} automata (3 fashions), words up to length 4, worst |diff| {worst:.2e}")


def test_labeled_trace_pipeline():
    """Trace probabilities match the classical-automaton reduction and are a
    probability distribution over fixed-length words."""
    rng = np.random.default_rng(102)
    worst = 0.0
    worst_total = 0.0
    for _ in range(30):
        m = random_slhqmc(rng, int(rng.integers(1, 4)), 2, ap=("p",))
        a = sl_to_chqa(m)
        for k in (1, 2, 3, 4):
            total = 0.0
            for w in (list(t) for t in itertools.product(m.alphabet, repeat=k)):
                p = sl_trace_prob(m, w)
                worst = max(worst, abs(p - hqa_accept_prob(a, w)))
                total += p
            worst_total = max(worst_total, abs(total - 1.0))
    ok = worst <= 1e-9 and worst_total <= 1e-9
    report("labeled trace pipeline", ok,
           f"30 chains, words up to length 4, worst |diff| {worst:.2e}, "
           f"worst totality defect {worst_total:.2e}")


def test_equivalence_vs_bruteforce():
    """The basis algorithm agrees with exhaustive word enumeration and its
    witnesses re-verify from the definition."""
    rng = np.random.default_rng(103)
    t0 = time.perf_counter()
    pairs = 0
    disagreements = 0
    witness_fail = 0
    while pairs < 200:
        n1 = int(rng.integers(1, 5))
        n2 = int(rng.integers(1, 5))
        if n1 + n2 > 8:
            continue
        b1 = random_blm(rng, n1)
        style = pairs % 4
        if style == 0:
            b2 = unitarily_similar_blm(rng, b1)
        elif style == 1:
            b2 = random_blm(rng, n2)
        elif style == 2:
            b2 = perturbed_blm(rng, b1, size=10.0 ** -rng.integers(2, 8))
        else:
            b2 = random_blm(rng, n1)
        for mode in ("eps", "plus"):
            v = blm_equivalent(b1, b2, mode=mode)
            bf = blm_k_equivalent_bruteforce(b1, b2, b1.n + b2.n - 1, mode=mode)
            if v.equivalent != bf.equivalent:
                disagreements += 1
            if not v.equivalent:
                d = abs(blm_weight(b1, v.witness) - blm_weight(b2, v.witness))
                if not d > 1e-9:
                    witness_fail += 1
        pairs += 1
    elapsed = time.perf_counter() - t0
    ok = disagreements == 0 and witness_fail == 0 and elapsed < 60.0
    report("equivalence vs brute force", ok,
           f"200 pairs x 2 modes, {disagreements} disagreements, "
           f"{witness_fail} unverifiable witnesses, {elapsed:.1f}s")


def test_equivalence_scalability():
    """Joint dimension 50 decides fast with a bounded basis."""
    rng = np.random.default_rng(104)
    t0 = time.perf_counter()
    worst_basis = 0
    for trial in range(4):
        b1 = random_blm(rng, 25)
        b2 = unitarily_similar_blm(rng, b1) if trial % 2 == 0 else random_blm(rng, 25)
        v = blm_equivalent(b1, b2)
        worst_basis = max(worst_basis, v.basis_size)
        assert v.basis_size <= 50
        if trial % 2 == 0:
            assert v.equivalent
    elapsed = time.perf_counter() - t0
    report("equivalence scalability", elapsed < 5.0 and worst_basis <= 50,
           f"4 pairs at joint dimension 50 in {elapsed:.2f}s, "
           f"largest basis {worst_basis}")


def test_witness_length_bound():
    """Inequivalent automata differ on a word no longer than the joint
    vectorized dimension minus one."""
    rng = np.random.default_rng(105)
    checked = 0
    inequivalent = 0
    for trial in range(20):
        shapes = []
        for _ in range(2):
            if rng.random() < 0.5:
                shapes.append((1, 2, "classical"))  # dim 1, 2 states
            else:
                shapes.append((2, 1, "quantum"))    # dim 2, 1 state
        (d1, k1, f1), (d2, k2, f2) = shapes
        a1 = random_hqa(rng, k1, d1, ("a", "b"), f1)
        a2 = random_hqa(rng, k2, d2, ("a", "b"), f2)
        bound = (d1 * k1) ** 2 + (d2 * k2) ** 2 - 1
        v = hqa_equivalent(a1, a2)
        first = None
        for w in all_words(("a", "b"), bound + 2):
            if abs(hqa_accept_prob(a1, w) - hqa_accept_prob(a2, w)) > 1e-9:
                first = w
                break
        if v.equivalent:
            assert first is None, (trial, first)
        else:
            assert first is not None, trial
            assert len(first) <= bound, (trial, len(first), bound)
            assert len(v.witness) <= bound
            inequivalent += 1
        checked += 1
    report("witness length bound", checked == 20,
           f"20 enumerable pairs (bound 7, enumerated to 9), "
           f"{inequivalent} inequivalent, all witnessed within the bound")


def orthogonal_path_chain():
    trans = {
        ("s1", "s0"): QuantumOperation([P1]),
        ("s2", "s0"): QuantumOperation([P0]),
        ("s1", "s2"): QuantumOperation([P0]),
        ("s3", "s2"): QuantumOperation([P1]),
        ("s1", "s1"): IDENT,
        ("s3", "s3"): IDENT,
    }
    return HqMC(2, ["s0", "s1", "s2", "s3"], trans, {"s0": PLUS})


def uniform_branch_chain():
    half = QuantumOperation([np.eye(2, dtype=complex) / np.sqrt(2)])
    trans = {
        ("s1", "s0"): half,
        ("s2", "s0"): half,
        ("s1", "s2"): half,
        ("s3", "s2"): half,
        ("s1", "s1"): IDENT,
        ("s3", "s3"): IDENT,
    }
    return HqMC(2, ["s0", "s1", "s2", "s3"], trans, {"s0": PLUS})


def truncated_first_passage(m, start, target, rho, depth):
    """Depth-truncated first-passage probability plus a sound tail bound.

    Walks every path from start, accumulating the evolved (unnormalized)
    matrix; paths reaching the target contribute their trace, paths that can
    still reach it later contribute to the tail bound. The true probability
    lies in [hit, hit + tail]."""
    edges = m.underlying_edges()
    reaching = {target}
    changed = True
    while changed:
        changed = False
        for (a, b) in edges:
            if b in reaching and a not in reaching:
                reaching.add(a)
                changed = True
    hit = 0.0
    frontier = [(start, np.array(rho, dtype=complex))]
    for _ in range(depth):
        nxt = []
        for state, mat in frontier:
            for t in m.states:
                op = m.trans.get((t, state))
                if op is None:
                    continue
                out = op.apply(mat)
                tr = float(np.trace(out).real)
                if t == target:
                    hit += tr
                elif t in reaching and tr > 1e-300:
                    nxt.append((t, out))
        frontier = nxt
    tail = sum(float(np.trace(mat).real) for _, mat in frontier)
    return hit, tail


def test_interference_separation():
    """Graph reachability overestimates quantum reachability: the orthogonal
    projector chain never reaches its final state although a graph path
    exists; the uniform classical variant reaches it with probability 1/4."""
    rng = np.random.default_rng(106)
    mq = orthogonal_path_chain()
    rq = reach_measure(mq, ["s3"])
    assert ("s0", "s2") in mq.underlying_edges() and ("s2", "s3") in mq.underlying_edges()
    worst_q = 0.0
    for _ in range(20):
        rho = random_density(rng, 2)
        worst_q = max(worst_q, abs(rq.measures["s0"].trace_on(rho)))

    mc = uniform_branch_chain()
    rc = reach_measure(mc, ["s3"])
    rho_mixed = np.eye(2, dtype=complex) / 2
    got = rc.measures["s0"].trace_on(rho_mixed)
    hit, tail = truncated_first_passage(mc, "s0", "s3", rho_mixed, 40)
    # the truncated sum brackets the true value: hit <= p <= hit + tail
    oracle_ok = abs(got - hit) <= tail + 1e-9 and abs(hit - 0.25) <= tail + 1e-9
    classical_err = abs(got - 0.25)

    def label(chain):
        return SLHqMC(chain, ["bad"],
                      {s: ["bad"] if s == "s3" else [] for s in chain.states})

    dfa = Dfa(["watch", "seen"], [(), ("bad",)],
              {("watch", ()): "watch", ("watch", ("bad",)): "seen",
               ("seen", ()): "seen", ("seen", ("bad",)): "seen"},
              "watch", ["seen"])
    safe_q = check_safety(label(mq), dfa, "s0", PLUS).probability_satisfy
    safe_c = check_safety(label(mc), dfa, "s0", rho_mixed).probability_satisfy

    ok = (worst_q <= 1e-12 and classical_err <= 1e-9 and oracle_ok
          and abs(safe_q - 1.0) <= 1e-9 and abs(safe_c - 0.75) <= 1e-9)
    report("interference separation", ok,
           f"quantum reach trace <= {worst_q:.1e} on 20 densities, "
           f"classical reach 0.25 +/- {classical_err:.1e} "
           f"(path-sum bracket width {tail:.1e}), safety {safe_q:.6f} / {safe_c:.6f}")


def test_measure_additivity():
    """Cylinder measures of all depth-k prefixes sum to one, and the safety
    decomposition satisfies satisfy + violate = identity on random states."""
    rng = np.random.default_rng(107)
    worst_cyl = 0.0
    for _ in range(10):
        m = random_hqmc(rng, 3, 2)
        rho = random_density(rng, 2)
        start = m.states[int(rng.integers(len(m.states)))]
        for k in (1, 2, 3, 4):
            paths = [[start]]
            for _ in range(k - 1):
                paths = [p + [t] for p in paths for t in m.states]
            total = sum(cylinder_measure(m, start, p, rho) for p in paths)
            worst_cyl = max(worst_cyl, abs(total - 1.0))

    dfa = Dfa(["q0", "q1"], [(), ("bad",)],
              {("q0", ()): "q0", ("q0", ("bad",)): "q1",
               ("q1", ()): "q1", ("q1", ("bad",)): "q1"},
              "q0", ["q1"])
    worst_part = 0.0
    m = random_slhqmc(rng, 3, 2, ap=("bad",))
    res = check_safety(m, dfa, m.states[0])
    slack = 1e-9 + res.residual
    for _ in range(100):
        rho = random_density(rng, 2)
        for s in m.states:
            sat, vio = res.per_state[s]
            worst_part = max(worst_part, abs(sat.trace_on(rho) + vio.trace_on(rho) - 1.0))
    ok = worst_cyl <= 1e-9 and worst_part <= slack
    report("measure additivity", ok,
           f"cylinder totals within {worst_cyl:.2e} for depths 1..4, "
           f"safety partition within {worst_part:.2e} on 100 densities")


def test_vectorization_identities():
    """Row-stacking identities and the superoperator homomorphism hold to
    1e-10 on 1000 random instances each."""
    rng = np.random.default_rng(108)
    worst_p1 = worst_p2 = worst_h = 0.0
    for _ in range(1000):
        d = int(rng.integers(1, 4))
        a, x, b = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
                   for _ in range(3))
        lhs = linalg.vec(a @ x @ b)
        rhs = linalg.kron(a, b.T) @ linalg.vec(x)
        worst_p1 = max(worst_p1, linalg.max_abs(lhs - rhs))
        worst_p2 = max(worst_p2, abs(np.trace(a @ b) - linalg.vec(a.T) @ linalg.vec(b)))
    for _ in range(1000):
        d = int(rng.integers(1, 4))
        e = QuantumOperation([rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
                              for _ in range(int(rng.integers(1, 3)))])
        f = QuantumOperation([rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))])
        rho = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        worst_h = max(worst_h, linalg.max_abs(
            e.superop_matrix() @ linalg.vec(rho) - linalg.vec(e.apply(rho))))
        worst_h = max(worst_h, linalg.max_abs(
            op_sum(e, f).superop_matrix() - (e.superop_matrix() + f.superop_matrix())))
        worst_h = max(worst_h, linalg.max_abs(
            op_compose(e, f).superop_matrix() - e.superop_matrix() @ f.superop_matrix()))
    ok = worst_p1 <= 1e-10 and worst_p2 <= 1e-10 and worst_h <= 1e-10
    report("vectorization identities", ok,
           f"1000 instances each: product rule {worst_p1:.2e}, "
           f"trace pairing {worst_p2:.2e}, homomorphism {worst_h:.2e}")
