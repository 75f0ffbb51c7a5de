"""Figure data products: delimited CSV (authoritative) plus an SVG render.

Every figure function writes <name>.csv and <name>.svg into the output
directory and returns the CSV path. Rendering is pinned for reproducible
bytes: fixed svg.hashsalt, no Date metadata.
"""

import cmath
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .cfcore import bar_invert
from .distribution import ecdf, scan_form
from .forms import cotangent_scan, kontsevich_phistar

FIG4_PANELS = {
    "a": (-0.7, 24001, 10000),
    "b": (-3.2, 2001, 2000),
    "c": (-0.5, 24001, 3000),
    "d": (complex(-0.5, 0.51), 24001, 3000),
    "e": (0.0, 24001, 3000),
    "f": (0.5, 24001, 3000),
    "g": (complex(0.5, 1.39), 24001, 3000),
    "h": (1.5, 24001, 3000),
}

CSV_SCHEMA = "qmflab-figure-v1"


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "qmflab"
    import matplotlib.pyplot as plt

    return plt


def _write_csv(path: Path, kind: str, header: str, rows) -> None:
    lines = [f"# {CSV_SCHEMA} {kind}", header]
    lines.extend(rows)
    path.write_text("\n".join(lines) + "\n")


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


def _f(x: float) -> str:
    return repr(float(x))


def fig1(outdir) -> Path:
    """Re and Im of the reversed-normalized Kontsevich limit at every
    reduced fraction in (0, 1] with denominator at most 101."""
    outdir = Path(outdir)
    pts = []
    for q in range(1, 102):
        for b in range(1, q + 1):
            if math.gcd(b, q) == 1:
                x = Fraction(b, q)
                pts.append((b, q, kontsevich_phistar(x)))
    rows = [f"{b},{q},{_f(z.real)},{_f(z.imag)}" for b, q, z in pts]
    csv_path = outdir / "fig1.csv"
    _write_csv(csv_path, "fig1", "num,den,re,im", rows)

    plt = _pyplot()
    xs = np.array([b / q for b, q, _ in pts])
    zs = np.array([z for _, _, z in pts])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.scatter(xs, zs.real, s=2, label="Re", color="tab:blue")
    ax.scatter(xs, zs.imag, s=2, label="Im", color="tab:orange")
    ax.set_xlabel("x")
    ax.legend(loc="upper right")
    _save(fig, outdir / "fig1.svg")
    plt.close(fig)
    return csv_path


def _fig_ecdf(outdir, name: str, a: complex, normalization: str) -> Path:
    outdir = Path(outdir)
    sample = scan_form("cot", 5000, normalization, a=a)
    cdf = ecdf(sample)
    n = len(cdf.sorted_points)
    rows = [
        f"{_f(t)},{_f((i + 1) / n)}" for i, t in enumerate(cdf.sorted_points)
    ]
    csv_path = outdir / f"{name}.csv"
    _write_csv(csv_path, name, "value,cdf", rows)

    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.step(cdf.sorted_points, np.arange(1, n + 1) / n, where="post")
    ax.set_xlabel("value")
    ax.set_ylabel("CDF")
    _save(fig, outdir / f"{name}.svg")
    plt.close(fig)
    return csv_path


def fig3a(outdir) -> Path:
    """Empirical CDF of the raw cotangent values at a = -2, q = 5000."""
    return _fig_ecdf(outdir, "fig3a", -2.0, "raw")


def fig3b(outdir) -> Path:
    """Empirical CDF of the q^{-3/2}-scaled values at a = 1/2, q = 5000."""
    return _fig_ecdf(outdir, "fig3b", 0.5, "q_pow_minus_k")


def fig4(panel: str, outdir) -> Path:
    """Sample points of c_a at denominator q: raw values when Re(a) < -1,
    reversed-argument q^{-1-a}-scaled values when Re(a) > -1 (the two
    real-line extensions the scans converge to). Points are the fractions
    b/q with b <= N coprime to q."""
    if panel not in FIG4_PANELS:
        raise ValueError(f"unknown panel {panel!r} (choose from a-h)")
    a, q, n_points = FIG4_PANELS[panel]
    outdir = Path(outdir)
    bs = np.array(
        [b for b in range(1, n_points + 1) if math.gcd(b, q) == 1], dtype=np.int64
    )
    if complex(a).real < -1:
        vals = cotangent_scan(a, q, residues=bs)
    else:
        bars = np.array(
            [bar_invert(Fraction(int(b), q)).numerator for b in bs], dtype=np.int64
        )
        vals = cotangent_scan(a, q, residues=bars)
        vals = vals * cmath.exp(-(1 + complex(a)) * math.log(q))
    rows = [
        f"{b},{q},{_f(z.real)},{_f(z.imag)}" for b, z in zip(bs, vals)
    ]
    csv_path = outdir / f"fig4_{panel}.csv"
    _write_csv(csv_path, f"fig4:{panel}", "num,den,re,im", rows)

    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.scatter(bs / q, vals.real, s=1)
    ax.set_xlabel("x")
    ax.set_ylabel("Re value")
    ax.set_title(f"a = {a}, q = {q}")
    _save(fig, outdir / f"fig4_{panel}.svg")
    plt.close(fig)
    return csv_path


FIGURES = {
    "fig1": fig1,
    "fig3a": fig3a,
    "fig3b": fig3b,
}
