"""Figure rendering for reports, convergence studies and meshes."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_margins(reports, path) -> None:
    """Horizontal bar chart of inequality margins with the error budget."""
    reports = list(reports)
    fig, ax = plt.subplots(figsize=(8, max(2.5, 0.35 * len(reports) + 1)))
    labels, margins, budgets, colors = [], [], [], []
    for r in reports:
        variant = r.inputs.get("variant", "")
        labels.append(f"{r.theorem_id} p={r.p} k={r.k}" + (f" {variant}" if variant else ""))
        margins.append(0.0 if np.isnan(r.margin) else r.margin)
        budgets.append(r.error_budget)
        colors.append({"pass": "tab:green", "fail": "tab:red"}.get(r.status, "tab:gray"))
    y = np.arange(len(labels))
    ax.barh(y, margins, color=colors)
    ax.errorbar(margins, y, xerr=budgets, fmt="none", ecolor="black",
                elinewidth=0.8, capsize=2)
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_yticks(y)
    ax.set_yticklabels(labels, fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel("margin (inequality orientation)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_convergence(study: dict, path) -> None:
    """Log-log eigenvalue-increment plot for one convergence study."""
    h = np.asarray(study["h"], dtype=float)
    v = np.asarray(study["values"], dtype=float)
    fig, ax = plt.subplots(figsize=(5, 4))
    if "reference" in study:
        err = np.abs(v - study["reference"])
        ax.loglog(h, err, "o-", label="error vs reference")
    else:
        ax.loglog(h[1:], np.abs(np.diff(v)), "o-", label="successive increments")
    ax.set_xlabel("mesh size h")
    ax.set_ylabel("eigenvalue error")
    ax.set_title(f"{study['problem']} p={study['p']} {study['shape']} "
                 f"(rate {study['rate']:.2f})")
    ax.grid(True, which="both", linewidth=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_mesh(mesh, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.triplot(mesh.vertices[:, 0], mesh.vertices[:, 1], mesh.triangles,
               linewidth=0.4, color="tab:blue")
    for f in mesh.boundary_facets:
        seg = mesh.vertices[list(f.endpoints)]
        ax.plot(seg[:, 0], seg[:, 1], color="tab:red", linewidth=1.0)
    ax.set_aspect("equal")
    ax.set_title(mesh.domain_tag)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
