"""Empirical distributions of form values: residue scans, ECDFs, KS
distances, atom diagnostics, and pushforward sampling along random
continued-fraction streams.

Samples are immutable once built. Scans put one value per residue coprime
to q; the pushforward sampler expands Lebesgue-uniform points into quotient
streams (their digits carry the Gauss-Kuzmin statistics) and evaluates the
extension matching the sign of the weight.
"""

import cmath
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Optional, Union

import numpy as np

from .cfcore import cf_expand, in_frak_T, sigma_phase
from .engine import QmfSpec, ext_neg, ext_pos
from .forms import (
    coprime_residues,
    cotangent_ext_pos,
    cotangent_scan,
    cotangent_spec,
    kontsevich_scan,
    kontsevich_spec,
)
from .forms.kontsevich import TWIST24

NORMALIZATIONS = ("raw", "q_pow_minus_k")


@dataclass(frozen=True)
class EmpiricalSample:
    """Multiset of complex form values plus provenance metadata."""

    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 1 or len(vals) == 0:
            raise ValueError("sample must be a nonempty 1-d array")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


def project(sample: Union[EmpiricalSample, np.ndarray], angle: float = 0.0) -> np.ndarray:
    """Real linear form z -> Re(e^{i*angle} z) applied pointwise."""
    vals = sample.values if isinstance(sample, EmpiricalSample) else np.asarray(sample)
    return np.real(cmath.exp(1j * angle) * vals)


@dataclass(frozen=True)
class Ecdf:
    """Right-continuous empirical CDF; steps 0 -> 1 over sorted_points."""

    sorted_points: np.ndarray

    def __post_init__(self):
        pts = np.sort(np.asarray(self.sorted_points, dtype=float))
        if len(pts) == 0:
            raise ValueError("empty point set")
        object.__setattr__(self, "sorted_points", pts)

    def __call__(self, t: float) -> float:
        return float(np.searchsorted(self.sorted_points, t, side="right")) / len(
            self.sorted_points
        )


def ecdf(sample: EmpiricalSample, angle: float = 0.0) -> Ecdf:
    return Ecdf(project(sample, angle))


def ecdf_eval(cdf: Ecdf, t: float) -> float:
    return cdf(t)


def ks_distance(f: Ecdf, g: Ecdf) -> float:
    """Sup-norm distance. Both CDFs are piecewise constant between jumps,
    so the sup is attained among the right limits at the merged jump set."""
    grid = np.union1d(f.sorted_points, g.sorted_points)
    fv = np.searchsorted(f.sorted_points, grid, side="right") / len(f.sorted_points)
    gv = np.searchsorted(g.sorted_points, grid, side="right") / len(g.sorted_points)
    return float(np.abs(fv - gv).max())


def max_atom(values, eps: float) -> float:
    """Largest fraction of points inside any closed window of length eps."""
    if eps <= 0:
        raise ValueError("window must be positive")
    v = np.sort(np.asarray(values, dtype=float))
    hi = np.searchsorted(v, v + eps, side="right")
    return float((hi - np.arange(len(v))).max()) / len(v)


def scan_form(
    form: str,
    q: int,
    normalization: str = "raw",
    a: Optional[complex] = None,
) -> EmpiricalSample:
    """Values over all residues coprime to q, raw or q^{-k}-scaled.

    Forms: "cot" (parameter a, weight 1+a) and "kontsevich" (weight 3/2,
    24th-root twist; the scaled branch carries the e(-sigma/24) phase that
    makes the multiset match the limit object)."""
    if q < 2:
        raise ValueError("q must be >= 2")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    meta = {"form": form, "q": q, "normalization": normalization}
    if form == "cot":
        if a is None:
            raise ValueError("form 'cot' requires parameter a")
        vals = cotangent_scan(a, q)
        if normalization == "q_pow_minus_k":
            vals = vals * cmath.exp(-(1 + complex(a)) * math.log(q))
        meta["a"] = str(a)
    elif form == "kontsevich":
        vals = kontsevich_scan(q)
        if normalization == "q_pow_minus_k":
            scale = q**-1.5
            phases = np.array(
                [
                    TWIST24.power(-sigma_phase(Fraction(int(b), q)))
                    for b in coprime_residues(q)
                ]
            )
            vals = vals * phases * scale
    else:
        raise ValueError(f"unknown form id {form!r}")
    return EmpiricalSample(vals, meta)


def _stream(rng: random.Random, cap: float, den_cap: int) -> Iterator[int]:
    """Partial quotients of a Lebesgue-uniform point.

    The point is an exact 128-bit dyadic draw, so the digits emitted here
    coincide with those of a uniform real until the continuants pass 2^64,
    far beyond den_cap. Digits follow the Gauss-Kuzmin statistics (the
    first one has the heavier law P(b1 = m) = 1/(m(m+1)), which iid
    Gauss-Kuzmin draws would miss). Oversized digits are capped to keep the
    stream inside T(cap); the continuant guard aborts streams whose
    convergent denominators would make the next evaluation too costly.
    """
    rem = Fraction(rng.getrandbits(128) | 1, 1 << 128)
    v_prev, v_cur = 0, 1
    j = 1
    while rem:
        inv = 1 / rem
        true_b = int(inv)
        rem = inv - true_b
        bound = cap if j == 1 else max(cap, j * math.log(j) ** 2)
        b = min(true_b, int(bound))
        v_prev, v_cur = v_cur, b * v_cur + v_prev
        if v_cur > den_cap:
            raise ValueError("continuant cap exceeded")
        yield b
        j += 1


def sample_pushforward(
    form: Union[str, QmfSpec],
    n: int,
    depth: int = 60,
    tol: float = 1e-3,
    cap_b: float = 1e4,
    seed: int = 0,
    a: Optional[complex] = None,
    den_cap: Optional[int] = None,
) -> EmpiricalSample:
    """Distribution of the extension along n uniform-random points.

    Each stream is the quotient expansion of a fresh uniform draw, capped
    at cap_b so it lies in T(cap_b). Negative-real-weight forms go through
    ext_neg, positive ones through ext_pos ("cot" with Re a > -1 uses the
    fractional-part-corrected extension). Streams that fail to converge,
    hit the continuant guard, or exhaust depth are counted; more than 1%
    of them is an error. Output is a deterministic function of (seed, n)
    and the parameters."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(form, QmfSpec):
        spec = form
        kind = "spec"
        weight = complex(spec.weight_k)
        form_id = spec.name
    elif form == "cot":
        if a is None:
            raise ValueError("form 'cot' requires parameter a")
        spec = cotangent_spec(a)
        kind = "cot"
        weight = complex(1 + complex(a))
        form_id = form
    elif form == "kontsevich":
        spec = kontsevich_spec()
        kind = "spec"
        weight = complex(spec.weight_k)
        form_id = form
    else:
        raise ValueError(f"unknown form id {form!r}")
    if weight.real == 0:
        raise ValueError("weight must have nonzero real part")
    if den_cap is None:
        # kontsevich evaluations at near-resonant arguments need arbitrary
        # precision, so their streams are cut earlier than table-based forms
        den_cap = 200_000 if form == "kontsevich" else 1 << 23

    master = random.Random(seed)
    seeds = [master.getrandbits(64) for _ in range(n)]
    out = []
    failures = 0
    for s in seeds:
        stream = _stream(random.Random(s), cap_b, den_cap)
        try:
            if kind == "cot" and weight.real > 0:
                res = cotangent_ext_pos(a, stream, tol=tol, max_depth=depth)
            elif weight.real > 0:
                res = ext_pos(spec, stream, tol=tol, max_depth=depth)
            else:
                res = ext_neg(spec, stream, tol=tol, max_depth=depth)
        except ValueError:
            failures += 1
            continue
        if res.converged:
            out.append(res.value)
        else:
            failures += 1
    if failures > 0.01 * n:
        raise RuntimeError(
            f"{failures}/{n} streams failed to converge (budget is 1%)"
        )
    meta = {
        "form": form_id,
        "n": n,
        "depth": depth,
        "tol": tol,
        "cap_b": cap_b,
        "seed": seed,
        "n_nonconvergent": failures,
    }
    if a is not None:
        meta["a"] = str(a)
    return EmpiricalSample(np.array(out), meta)


def frak_A_fraction(q: int) -> float:
    """Fraction of residues b coprime to q whose expansion of b/q keeps all
    partial quotients under B = log2(q) (log2 log2 q)^2 (with the j (log j)^2
    relaxation at late indices). Tends to 1 as q grows."""
    if q < 3:
        raise ValueError("q must be >= 3")
    bound = math.log2(q) * math.log2(math.log2(q)) ** 2
    residues = coprime_residues(q)
    hits = sum(
        1 for b in residues if in_frak_T(cf_expand(Fraction(int(b), q)), bound)
    )
    return hits / len(residues)


def ks_thresholds() -> dict:
    """Calibrated KS bounds and sampler settings shipped with the package."""
    path = Path(__file__).parent / "data" / "ks_thresholds.json"
    return json.loads(path.read_text())


CSV_SCHEMA = "qmflab-sample-v1"


def _format_float(x: float) -> str:
    return repr(float(x))


def write_sample_csv(sample: EmpiricalSample, path) -> None:
    """CSV with header index,re,im (binary64 round-trip formatting) plus a
    .meta.json sidecar holding the sample metadata."""
    path = Path(path)
    lines = [f"# {CSV_SCHEMA}", "index,re,im"]
    for i, z in enumerate(sample.values):
        lines.append(f"{i},{_format_float(z.real)},{_format_float(z.imag)}")
    path.write_text("\n".join(lines) + "\n")
    sidecar = path.with_suffix(".meta.json")
    sidecar.write_text(json.dumps(sample.meta, indent=2, sort_keys=True) + "\n")


def read_sample_csv(path) -> EmpiricalSample:
    path = Path(path)
    rows = []
    for line in path.read_text().splitlines():
        if not line or line.startswith("#") or line.startswith("index,"):
            continue
        _, re_s, im_s = line.split(",")
        rows.append(complex(float(re_s), float(im_s)))
    sidecar = path.with_suffix(".meta.json")
    meta = json.loads(sidecar.read_text()) if sidecar.exists() else {}
    return EmpiricalSample(np.array(rows), meta)
