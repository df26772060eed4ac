"""Plot emission from persisted run artifacts.

Figures are SVG with a pinned hash salt and no date metadata, so identical
artifacts render to byte-identical files.  Everything is driven off the
run_metadata.json in the artifact directory; nothing is recomputed.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "latwave"
matplotlib.rcParams["svg.fonttype"] = "none"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

SAVE = {"metadata": {"Date": None}, "format": "svg"}


class ArtifactError(ValueError):
    """A required artifact is missing, malformed, or empty."""


def _read_json(path: Path):
    if not path.is_file():
        raise ArtifactError(f"missing artifact {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _read_csv(path: Path) -> dict:
    """Column dict from one of our CSVs (header row + numeric rows)."""
    if not path.is_file():
        raise ArtifactError(f"missing artifact {path}")
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln]
    if len(lines) < 2:
        raise ArtifactError(f"{path}: empty trajectory")
    header = lines[0].split(",")
    cols = {name: [] for name in header}
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(header):
            raise ArtifactError(f"{path}: ragged row {ln!r}")
        for name, val in zip(header, parts):
            cols[name].append(val)
    return cols


def _floats(col) -> list:
    return [float(x) for x in col]


def emit_plots(run_dir, out_dir=None) -> list:
    """Render the figures appropriate to the artifacts in run_dir.

    Returns the list of written SVG paths.  The verb recorded in
    run_metadata.json decides the figure set.
    """
    run_dir = Path(run_dir)
    meta_path = run_dir if run_dir.suffix == ".json" else run_dir / "run_metadata.json"
    run_dir = meta_path.parent
    meta = _read_json(meta_path)
    out = Path(out_dir) if out_dir is not None else run_dir / "plots"
    out.mkdir(parents=True, exist_ok=True)
    verb = meta.get("verb")
    if verb == "simulate":
        model = meta["config"]["model"]
        if model in ("dnls", "linear-schrodinger"):
            return [_plot_norms(run_dir, out, meta)]
        return [_plot_kg(run_dir, out)]
    if verb == "blowup":
        return [_plot_blowup(run_dir, out, meta), _plot_kg(run_dir, out)]
    if verb == "growth-sweep":
        return [_plot_growth(run_dir, out)]
    if verb == "kernel-sweep":
        return [_plot_kernel(run_dir, out)]
    raise ArtifactError(f"{meta_path}: unknown or missing verb {verb!r}")


def _p_from_column(name: str) -> str:
    return name[len("norm_p"):]


def _plot_norms(run_dir: Path, out: Path, meta: dict) -> Path:
    cols = _read_csv(run_dir / "trajectory.csv")
    ts = _floats(cols["t"])
    lat = meta["config"]["lattice"]
    rate = 2.0 * lat["d"] / lat["h"] ** 2
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name in cols:
        if name.startswith("norm_p"):
            label = _p_from_column(name)
            ax.plot(ts, _floats(cols[name]), label=f"p = {label}")
    norms2 = _floats(cols.get("norm_p2", next(
        cols[c] for c in cols if c.startswith("norm_p"))))
    envelope = [norms2[0] * math.exp(rate * t) for t in ts]
    ax.plot(ts, envelope, "k--", label="a priori envelope")
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("lp norm")
    ax.legend(loc="best", fontsize=8)
    path = out / "norms.svg"
    fig.savefig(path, **SAVE)
    plt.close(fig)
    return path


def _plot_kg(run_dir: Path, out: Path) -> Path:
    cols = _read_csv(run_dir / "trajectory.csv")
    ts = _floats(cols["t"])
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name in ("l2_u", "l2_v", "linf_u"):
        ax.plot(ts, _floats(cols[name]), label=name)
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax2 = ax.twinx()
    ax2.plot(ts, _floats(cols["energy"]), "k:", label="energy")
    ax2.set_ylabel("energy")
    ax.legend(loc="upper left", fontsize=8)
    path = out / "energy.svg"
    fig.savefig(path, **SAVE)
    plt.close(fig)
    return path


def _plot_blowup(run_dir: Path, out: Path, meta: dict) -> Path:
    cols = _read_csv(run_dir / "trajectory.csv")
    reports = _read_json(run_dir / "reports.json")
    monitor = next((r for r in reports if "T_pred" in r), None)
    if monitor is None:
        raise ArtifactError(f"{run_dir}/reports.json: no blow-up report found")
    sigma = meta["config"]["params"]["sigma"]
    ts = _floats(cols["t"])
    I = _floats(cols["I"])
    ys = [(t, Iv ** (-sigma / 2.0)) for t, Iv in zip(ts, I) if Iv > 0]
    if not ys:
        raise ArtifactError(f"{run_dir}/trajectory.csv: I(t) never positive")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot([t for t, _ in ys], [y for _, y in ys], label="I(t)^(-sigma/2)")
    t1, I1, Ip1 = monitor["t1"], monitor["I_t1"], monitor["Iprime_t1"]
    y1 = I1 ** (-sigma / 2.0)
    slope = -(sigma / 2.0) * I1 ** (-sigma / 2.0 - 1.0) * Ip1
    span = [t for t, _ in ys if t >= t1]
    if span:
        ax.plot(span, [y1 + slope * (t - t1) for t in span], "k--",
                label="supporting tangent")
    ax.axvline(monitor["T_pred"], color="gray", lw=0.8, label="predicted ceiling")
    ax.set_xlabel("t")
    ax.set_ylabel("I^(-sigma/2)")
    ax.set_ylim(bottom=0)
    ax.legend(loc="best", fontsize=8)
    path = out / "blowup.svg"
    fig.savefig(path, **SAVE)
    plt.close(fig)
    return path


def _plot_growth(run_dir: Path, out: Path) -> Path:
    cols = _read_csv(run_dir / "growth_sweep.csv")
    labels = sorted(set(cols["p"]))
    fig, axes = plt.subplots(1, len(labels), figsize=(3.2 * len(labels), 3.4),
                             squeeze=False)
    for ax, label in zip(axes[0], labels):
        hs, meas, env = [], [], []
        for i in range(len(cols["p"])):
            if cols["p"][i] == label:
                hs.append(float(cols["h"][i]))
                meas.append(float(cols["exponent_measured"][i]))
                env.append(float(cols["exponent_envelope"][i]))
        order = sorted(range(len(hs)), key=lambda i: hs[i])
        ax.plot([hs[i] for i in order], [meas[i] for i in order], "o-",
                label="measured")
        ax.plot([hs[i] for i in order], [env[i] for i in order], "k--",
                label="envelope")
        ax.set_xscale("log")
        ax.set_title(f"p = {label}", fontsize=9)
        ax.set_xlabel("h")
    axes[0][0].set_ylabel("normalized growth exponent")
    axes[0][0].legend(fontsize=8)
    fig.tight_layout()
    path = out / "growth_sweep.svg"
    fig.savefig(path, **SAVE)
    plt.close(fig)
    return path


def _plot_kernel(run_dir: Path, out: Path) -> Path:
    doc = _read_json(run_dir / "kernel_sweep.json")
    records = doc.get("records", [])
    if not records:
        raise ArtifactError(f"{run_dir}/kernel_sweep.json: no records")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for d in sorted({rec["d"] for rec in records}):
        pts = sorted(((1.0 + abs(math.log(rec["h"])), rec["l1_norm"])
                      for rec in records if rec["d"] == d))
        ax.plot([x for x, _ in pts], [y for _, y in pts], "o-", label=f"d = {d}")
    ax.set_xlabel("1 + |ln h|")
    ax.set_ylabel("l1 kernel norm")
    ax.legend(fontsize=8)
    path = out / "kernel_sweep.svg"
    fig.savefig(path, **SAVE)
    plt.close(fig)
    return path
