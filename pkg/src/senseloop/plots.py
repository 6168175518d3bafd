"""Figure rendering for the CLI reports.

Figures are written next to the delimited output (PNG, Agg backend) and
carry no run-dependent metadata so re-runs stay byte-identical.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .forward_models import ScalingReport  # noqa: E402
from .reporting import atomic_write_bytes  # noqa: E402

_SAVE_KW = dict(format="png", dpi=120, metadata={"Software": None})


def _save(fig, path) -> None:
    buf = io.BytesIO()
    fig.savefig(buf, **_SAVE_KW)
    plt.close(fig)
    atomic_write_bytes(path, buf.getvalue())


def plot_scaling(report: ScalingReport, path) -> None:
    """Log-log entry counts for both learners, with the fitted slopes."""
    fig, ax = plt.subplots(figsize=(5, 4))
    ns = [r.n for r in report.rows]
    ax.loglog(
        ns,
        [r.disp_entries for r in report.rows],
        "o-",
        label=f"displacement (slope {report.disp_slope:.2f})",
    )
    ax.loglog(
        ns,
        [r.ee_entries for r in report.rows],
        "s-",
        label=f"end-effector (slope {report.ee_slope:.2f})",
    )
    ax.set_xlabel("grid resolution N")
    ax.set_ylabel("table entries for full coverage")
    ax.set_title(f"storage scaling ({report.displacement_set} displacement set)")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def plot_reach(trial_errors: list[float], controller: str, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.semilogy(range(len(trial_errors)), [max(e, 1e-12) for e in trial_errors], "o-")
    ax.set_xlabel("trial")
    ax.set_ylabel("final hand error [m]")
    ax.set_title(f"{controller} reaching")
    fig.tight_layout()
    _save(fig, path)


def plot_em_trace(trace: list[float], path) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(range(len(trace)), trace, "o-")
    ax.set_xlabel("iteration")
    ax.set_ylabel("total log-likelihood")
    ax.set_title("EM trace")
    fig.tight_layout()
    _save(fig, path)


def plot_entropy(entropies: list[float], policy: str, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(range(1, len(entropies) + 1), entropies, "o-")
    ax.axhline(0.1, color="gray", linestyle="--", linewidth=1)
    ax.set_xlabel("step")
    ax.set_ylabel("belief entropy [nats]")
    ax.set_title(f"{policy} sensing policy")
    fig.tight_layout()
    _save(fig, path)
