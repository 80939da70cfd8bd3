"""Report rendering: delimited tables plus matplotlib figures.

Each report writes a CSV file and a PNG figure side by side in the chosen
directory, so the numbers stay scriptable while the picture gives the quick
read. matplotlib is imported lazily with the Agg backend; nothing here
opens a window.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from . import model_check, models
from .errors import HqmcError
from .models import Dfa, HqMC, QMC, SLHqMC, hqmc_step, qmc_step

_RC = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
    "legend.frameon": False,
}


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _tr(m) -> float:
    return float(np.trace(m).real)


def default_rho(chain: HqMC, s: str) -> np.ndarray:
    """Normalized initial mass of s when it carries any, else maximally mixed."""
    m0 = chain.init.get(s)
    if m0 is not None:
        tr = _tr(m0)
        if tr > chain._tol(None):
            return np.asarray(m0) / tr
    return np.eye(chain.dim, dtype=np.complex128) / chain.dim


def simulation_report(model, steps: int, outdir, basename: str = "simulation") -> list[Path]:
    """Trace trajectories over a fixed number of steps.

    Hybrid chains report the trace mass per classical state; plain quantum
    chains report the diagonal populations and the total trace.
    """
    if steps < 0:
        raise HqmcError(f"steps must be >= 0, got {steps}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    plt = _plt()

    if isinstance(model, SLHqMC):
        model = model.chain
    if isinstance(model, HqMC):
        labels = list(model.states)
        mu = model.initial_distribution()
        rows = [[0] + [_tr(mu[s]) for s in labels]]
        for n in range(1, steps + 1):
            mu = hqmc_step(model, mu)
            rows.append([n] + [_tr(mu[s]) for s in labels])
        header = ["step"] + labels
        ylabel = "trace mass"
    elif isinstance(model, QMC):
        labels = [f"p{i}" for i in range(model.dim)] + ["trace"]
        rho = np.array(model.init)
        rows = [[0] + [float(rho[i, i].real) for i in range(model.dim)] + [_tr(rho)]]
        for n in range(1, steps + 1):
            rho = qmc_step(model, rho)
            rows.append([n] + [float(rho[i, i].real) for i in range(model.dim)] + [_tr(rho)])
        header = ["step"] + labels
        ylabel = "population"
    else:
        raise HqmcError(f"simulation reports need a chain model, got {type(model).__name__}")

    csv_path = outdir / f"{basename}.csv"
    write_csv(csv_path, header, rows)

    fig_path = outdir / f"{basename}.png"
    data = np.array(rows, dtype=float)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for j, lab in enumerate(labels, start=1):
            ax.plot(data[:, 0], data[:, j], marker="o", markersize=3, label=lab)
        ax.set_xlabel("step")
        ax.set_ylabel(ylabel)
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(fig_path)
        plt.close(fig)
    return [csv_path, fig_path]


def safety_report(
    m: SLHqMC,
    dfa: Dfa,
    outdir,
    tol: float | None = None,
    max_iter: int = model_check.DEFAULT_MAX_ITER,
    basename: str = "safety",
) -> list[Path]:
    """Per-state satisfaction probabilities and solver convergence.

    Each state is evaluated on its own default initial density matrix (its
    normalized initial mass, or the maximally mixed state when it carries
    none). The convergence table holds the residual per sweep; a direct
    solve yields a single row with the final residual.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    plt = _plt()

    first = m.states[0]
    result = model_check.check_safety(
        m, dfa, first, default_rho(m.chain, first), tol=tol, max_iter=max_iter
    )
    probs = {}
    for s in m.states:
        satisfy, _ = result.per_state[s]
        probs[s] = satisfy.trace_on(default_rho(m.chain, s))

    prob_csv = outdir / f"{basename}.csv"
    write_csv(
        prob_csv,
        ["state", "dfa_state", "probability_satisfy"],
        [
            [s, dfa.step(dfa.q0, m.label[s]) if not result.degenerate else dfa.q0, probs[s]]
            for s in m.states
        ],
    )

    conv_csv = outdir / f"{basename}_convergence.csv"
    if result.residual_history:
        conv_rows = [[i + 1, r] for i, r in enumerate(result.residual_history)]
    else:
        conv_rows = [[0, result.residual]]
    write_csv(conv_csv, ["iteration", "residual"], conv_rows)

    paths = [prob_csv, conv_csv]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.bar(range(len(m.states)), [probs[s] for s in m.states])
        ax.set_xticks(range(len(m.states)))
        ax.set_xticklabels(m.states, rotation=30, ha="right")
        ax.set_ylabel("probability of staying safe")
        ax.set_ylim(0.0, 1.05)
        fig.tight_layout()
        bar_path = outdir / f"{basename}.png"
        fig.savefig(bar_path)
        plt.close(fig)
        paths.append(bar_path)

        if result.residual_history:
            fig, ax = plt.subplots()
            ax.semilogy(
                [r[0] for r in conv_rows],
                [max(r[1], 1e-300) for r in conv_rows],
            )
            ax.set_xlabel("sweep")
            ax.set_ylabel("residual")
            fig.tight_layout()
            conv_path = outdir / f"{basename}_convergence.png"
            fig.savefig(conv_path)
            plt.close(fig)
            paths.append(conv_path)
    return paths
