"""Bit-stable result emission: delimited text, JSON, and figure files.

Numbers are emitted with 12 significant digits in a locale-independent
format so identical configurations produce byte-identical CSV and JSON
regardless of parallelism.  Figures are rendered to files next to the
delimited output; they carry no information the CSV does not.
"""

from __future__ import annotations

import json
import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

DIMENSION_HEADER = "theta,r,rho,N,log_ratio,S_upper,S_last,slope,closed_form,abs_err"
VERDICT_HEADER = "check,instance,lhs,rhs,slack,pass"


def fmt(value) -> str:
    """12-significant-digit, locale-independent scalar formatting."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    return str(value)


def dimension_row(theta, r, rho, n, log_ratio, s_upper, s_last, slope, closed_form, abs_err) -> str:
    return ",".join(
        fmt(v) for v in (theta, r, rho, n, log_ratio, s_upper, s_last, slope, closed_form, abs_err)
    )


def verdict_row(verdict) -> str:
    return ",".join(
        (
            verdict.check,
            verdict.instance,
            fmt(verdict.lhs),
            fmt(verdict.rhs),
            fmt(verdict.slack),
            "pass" if verdict.passed else "fail",
        )
    )


def write_text(path: str, lines) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="\n") as handle:
        for line in lines:
            handle.write(line)
            handle.write("\n")


def write_json(path: str, payload) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="\n") as handle:
        json.dump(_jsonable(payload), handle, indent=2, sort_keys=True)
        handle.write("\n")


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, float):
        # round-trip through the emission format so JSON and CSV agree
        return float(fmt(value))
    return value


def _new_axes(title: str, xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def dims_figure(record: dict, path: str) -> None:
    labels = ["h", "h'", "h_cond", "mmdim", "madim"]
    values = [
        record.get("h_omega"),
        record.get("h_omega_prime"),
        record.get("h_conditional"),
        record.get("mmdim"),
        record.get("madim"),
    ]
    pairs = [(l, v) for l, v in zip(labels, values) if v is not None]
    fig, ax = _new_axes("Entropies and dimensions", "", "value")
    ax.bar([l for l, _ in pairs], [v for _, v in pairs], color="#4878a8")
    _save(fig, path)


def spectrum_figure(points, transition: float, path: str) -> None:
    """points: iterable of (theta, estimated_or_None, closed_or_None)."""
    thetas = [p[0] for p in points]
    fig, ax = _new_axes("Mean Assouad spectrum", "theta", "dimension")
    closed = [(t, c) for t, _, c in points if c is not None]
    est = [(t, e) for t, e, _ in points if e is not None]
    if closed:
        ax.plot([t for t, _ in closed], [c for _, c in closed], "-", label="closed form")
    if est:
        ax.plot([t for t, _ in est], [e for _, e in est], "o", ms=4, label="estimate")
    ax.axvline(transition, color="gray", ls="--", lw=1, label="transition")
    ax.legend()
    _save(fig, path)


def sweep_figure(reports: dict, path: str) -> None:
    """reports: name -> DimensionReport with .points and .slope."""
    fig, ax = _new_axes("Log-log cover-count sweep", "log(r/rho)", "S estimate")
    for name, rep in reports.items():
        xs = [x for x, _ in rep.points]
        ys = [y for _, y in rep.points]
        ax.plot(xs, ys, "o", ms=4, label=f"{name} (slope {rep.slope:.3f})")
        lo, hi = min(xs), max(xs)
        ax.plot([lo, hi], [rep.slope * lo + rep.intercept, rep.slope * hi + rep.intercept], "-", lw=1)
    ax.legend()
    _save(fig, path)


def verify_figure(verdicts, wandering_rows, path: str) -> None:
    if wandering_rows:
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    else:
        fig, ax1 = plt.subplots(figsize=(6.0, 4.0))
        ax2 = None
    by_check = {}
    for v in verdicts:
        ok, bad = by_check.get(v.check, (0, 0))
        by_check[v.check] = (ok + (1 if v.passed else 0), bad + (0 if v.passed else 1))
    names = sorted(by_check)
    ax1.barh(names, [by_check[n][0] for n in names], color="#55a868", label="pass")
    ax1.barh(
        names,
        [by_check[n][1] for n in names],
        left=[by_check[n][0] for n in names],
        color="#c44e52",
        label="fail",
    )
    ax1.set_title("Verification verdicts")
    ax1.legend()
    if ax2 is not None:
        ax2.plot([r.depth for r in wandering_rows], [r.bound for r in wandering_rows], "o-")
        ax2.set_title("Wandering-demo bound decay")
        ax2.set_xlabel("depth M")
        ax2.set_ylabel("bound")
        ax2.set_xscale("log", base=2)
        ax2.grid(True, alpha=0.3)
    _save(fig, path)


def fullshift_figure(curves: dict, path: str) -> None:
    """curves: theta -> list of CurvePoint."""
    fig, ax = _new_axes("Full-shift covering curves", "log(r/rho)", "normalized log count")
    for theta, pts in sorted(curves.items()):
        xs = [p.log_ratio for p in pts]
        ax.plot(xs, [p.s_upper for p in pts], "o-", ms=3, label=f"theta={theta:g} upper")
        ax.plot(xs, [p.s_lower for p in pts], "--", lw=1, label=f"theta={theta:g} lower")
    ax.legend(fontsize=7)
    _save(fig, path)
