"""Command-line front end: continued-fraction inspection, form evaluation,
residue scans, ECDF exports, figure data products, and invariant check
suites. Exit codes: 0 success, 1 failed check, 2 usage error."""

import argparse
import cmath
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import cfcore


class UsageError(Exception):
    pass


def _parse_rational(text: str) -> Fraction:
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational: {text!r}") from exc


def _parse_value(text: str):
    for caster in (int, float):
        try:
            return caster(text)
        except ValueError:
            pass
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        return text  # non-numeric values (e.g. convention names) pass through


def _parse_params(pairs: str) -> dict:
    out = {}
    for item in pairs.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not key=value")
        key, val = item.split("=", 1)
        out[key.strip()] = _parse_value(val.strip())
    return out


def _load_config(path: str) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"config line {line!r} is not key=value")
        key, val = line.split("=", 1)
        out[key.strip()] = _parse_value(val.strip())
    return out


def _gather_params(args) -> dict:
    params = {}
    if getattr(args, "config", None):
        params.update(_load_config(args.config))
    if getattr(args, "params", None):
        params.update(_parse_params(args.params))
    return params


def _fmt_complex(z: complex) -> str:
    return f"{z.real!r},{z.imag!r}"


def _thread_count() -> int:
    env = os.environ.get("QMFLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"QMFLAB_THREADS must be an integer, got {env!r}")
    return min(4, os.cpu_count() or 1)


def _cmd_cf(args) -> int:
    x = _parse_rational(args.x)
    if x.denominator == 1:
        raise UsageError("cf needs a non-integer rational")
    cf = cfcore.cf_expand(x)
    quots = ",".join(str(b) for b in cf.quotients)
    print(f"x = {x}")
    print(f"cf = [{cf.b0};{quots}]")
    print("u = " + ",".join(str(u) for u in cfcore.backward_denominators(cf)))
    print("v = " + ",".join(str(v) for v in cfcore.continuants(cf)))
    frac = x - math.floor(x)
    print(f"bar = {cfcore.bar_invert(frac)}")
    print(f"sigma = {cfcore.sigma_phase(frac)}")
    print(f"s = {cfcore.dedekind_sum(frac)}")
    return 0


def _cmd_eval(args) -> int:
    x = _parse_rational(args.x)
    params = _gather_params(args)
    form = args.form
    if form == "kontsevich":
        from .forms import kontsevich_phi

        value = kontsevich_phi(x)
    elif form == "phistar":
        from .forms import kontsevich_phistar

        value = kontsevich_phistar(x)
    elif form == "cot":
        if "a" not in params:
            raise UsageError("form 'cot' needs --params a=...")
        from .forms import cotangent_c_tilde

        value = cotangent_c_tilde(params["a"], x)
    elif form == "delta":
        from .forms import delta_coefficients, eichler_tilde

        value = eichler_tilde(
            delta_coefficients(), 12, x, tol=params.get("tol", 1e-9)
        )
    elif form == "akd":
        from .forms import a_kd

        k = int(params.get("k", 5))
        d = int(params.get("D", 5))
        depth = int(params.get("depth", 8))
        convention = params.get("convention", "all")
        res = a_kd(k, d, x, depth, convention)
        print(f"{res.value!r} (tail_bound={res.tail_bound!r}, terms={res.terms})")
        return 0
    else:
        raise UsageError(f"unknown form {form!r}")
    print(_fmt_complex(complex(value)))
    return 0


_NORMS = {"raw": "raw", "qk": "q_pow_minus_k"}


def _cmd_scan(args) -> int:
    from .distribution import scan_form, write_sample_csv

    params = _gather_params(args)
    norm = _NORMS.get(args.norm)
    if norm is None:
        raise UsageError(f"unknown normalization {args.norm!r}")
    sample = scan_form(args.form, args.q, norm, a=params.get("a"))
    write_sample_csv(sample, args.out)
    print(f"wrote {args.out} ({len(sample)} values)")
    return 0


def _cmd_ecdf(args) -> int:
    from .distribution import CSV_SCHEMA, ecdf, read_sample_csv

    sample = read_sample_csv(args.infile)
    cdf = ecdf(sample, args.angle)
    n = len(cdf.sorted_points)
    lines = [f"# {CSV_SCHEMA} ecdf angle={args.angle!r}", "index,point,cdf"]
    for i, t in enumerate(cdf.sorted_points):
        lines.append(f"{i},{float(t)!r},{(i + 1) / n!r}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote {args.out} ({n} steps)")
    return 0


def _cmd_figure(args) -> int:
    from . import figures

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    name = args.name
    if name.startswith("fig4:"):
        csv_path = figures.fig4(name.split(":", 1)[1], outdir)
    elif name in figures.FIGURES:
        csv_path = figures.FIGURES[name](outdir)
    else:
        raise UsageError(f"unknown figure {name!r}")
    print(f"wrote {csv_path} and {csv_path.with_suffix('.svg')}")
    return 0


def _check_cfcore() -> list:
    import random

    def reconstruction():
        rng = random.Random(3)
        for _ in range(300):
            q = rng.randrange(2, 300)
            b = rng.randrange(1, q)
            if math.gcd(b, q) != 1:
                continue
            x = Fraction(b, q)
            cf = cfcore.cf_expand(x)
            assert cfcore.cf_value(cf) == x
            assert cfcore.bar_invert(cfcore.bar_invert(x)) == x

    def sigma_hickerson():
        for b, q in ((7, 17), (5, 12), (89, 144)):
            x = Fraction(b, q)
            xbar = cfcore.bar_invert(x)
            lhs = Fraction(cfcore.sigma_phase(x))
            assert lhs == x + xbar - 12 * cfcore.dedekind_sum(x)

    def gauss_contraction():
        for b, q in ((7, 17), (355, 613), (12, 29)):
            x = Fraction(b, q)
            assert x * cfcore.gauss_T(x) <= Fraction(1, 2)

    return [("cf reconstruction + involution", reconstruction),
            ("sigma matches x + xbar - 12s", sigma_hickerson),
            ("x T(x) <= 1/2", gauss_contraction)]


def _check_engine() -> list:
    import random

    from .engine import eval_f, eval_psi, w_eval
    from .forms import cotangent_c_tilde, cotangent_spec

    def reciprocity():
        spec = cotangent_spec(0.5)
        for q in range(2, 60):
            for b in range(1, q):
                if math.gcd(b, q) == 1:
                    x = Fraction(b, q)
                    assert abs(eval_f(spec, x) - cotangent_c_tilde(0.5, x)) < 1e-9

    def duality():
        from .forms import kontsevich_phistar, kontsevich_spec

        spec = kontsevich_spec()
        for b, q in ((1, 2), (3, 7), (45, 101)):
            x = Fraction(b, q)
            assert abs(eval_psi(spec, x) - kontsevich_phistar(x)) < 1e-10

    def w_bound():
        rng = random.Random(5)
        g = lambda t: cmath.exp(2j * math.pi * float(t))
        for _ in range(50):
            q = rng.randrange(5, 200)
            b = rng.randrange(1, q)
            if math.gcd(b, q) != 1:
                continue
            j = rng.randrange(1, 31)
            lam = rng.choice((1.0, 2.5, 4.0))
            val = w_eval(j, lam, g, Fraction(b, q))
            assert abs(val) <= 2.0 ** (lam * (1 - j / 2)) + 1e-12

    return [("chain reproduces direct values", reciprocity),
            ("psi duality", duality),
            ("w-bound", w_bound)]


def _check_forms() -> list:
    def cot_values():
        from .forms import cotangent_c

        assert abs(cotangent_c(0.0, 1, 3) - math.sqrt(3) / 9) < 1e-14
        assert cotangent_c(0.5, 1, 2) == 0

    def kontsevich_values():
        from .forms import kontsevich_phi, kontsevich_phistar

        tgt = 3 * cmath.exp(2j * math.pi / 48)
        assert abs(kontsevich_phi(Fraction(1, 2)) - tgt) < 1e-12
        assert abs(kontsevich_phistar(Fraction(1)) - cmath.exp(-2j * math.pi / 24)) < 1e-13

    def ash_ratio():
        from .forms import ash_main, cotangent_h

        r100 = abs(cotangent_h(0.5, Fraction(1, 100)) - ash_main(0.5, 0.01))
        r1000 = abs(cotangent_h(0.5, Fraction(1, 1000)) - ash_main(0.5, 0.001))
        assert r1000 < 0.2 * r100

    def akd_conventions():
        from .forms import a_kd

        assert a_kd(5, 5, 0, 4, "all").value == 2.0
        assert a_kd(5, 5, 0, 4, "nonneg").value == 1.0

    return [("cotangent hand values", cot_values),
            ("kontsevich fixed values", kontsevich_values),
            ("period asymptotics ratio", ash_ratio),
            ("lattice-sum conventions", akd_conventions)]


def _check_distribution() -> list:
    import numpy as np

    def ecdf_ks():
        from .distribution import Ecdf, ks_distance, max_atom

        F = Ecdf(np.array([0.0, 1.0]))
        assert F(0.5) == 0.5 and F(-1) == 0.0 and F(2) == 1.0
        assert ks_distance(Ecdf(np.array([0.0])), F) == 0.5
        assert max_atom([1.0] * 5, 1e-6) == 1.0

    def scan_oddness():
        from .distribution import scan_form

        s = scan_form("cot", 97, "raw", a=-2.0).values
        assert np.allclose(s, -s[::-1], atol=1e-12)

    def density():
        from .distribution import frak_A_fraction

        assert frak_A_fraction(1009) >= 0.9

    return [("ecdf / ks / atom oracles", ecdf_ks),
            ("scan oddness", scan_oddness),
            ("bounded-quotient density", density)]


CHECK_SUITES = {
    "cfcore": _check_cfcore,
    "engine": _check_engine,
    "forms": _check_forms,
    "distribution": _check_distribution,
}


def _cmd_check(args) -> int:
    names = list(CHECK_SUITES) if args.suite == "all" else [args.suite]
    if any(n not in CHECK_SUITES for n in names):
        raise UsageError(f"unknown suite {args.suite!r}")
    items = []
    for n in names:
        items.extend((n, label, fn) for label, fn in CHECK_SUITES[n]())

    def run_item(entry):
        suite, label, fn = entry
        try:
            fn()
            return suite, label, None
        except Exception as exc:  # noqa: BLE001 - report, do not crash the suite
            return suite, label, exc

    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_item, items))
    else:
        results = [run_item(entry) for entry in items]
    failed = 0
    for suite, label, err in results:
        if err is None:
            print(f"PASS [{suite}] {label}")
        else:
            failed += 1
            print(f"FAIL [{suite}] {label}: {err!r}")
    print(f"{len(results) - failed} passed, {failed} failed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmflab",
        description="quantum-modular-form laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cf = sub.add_parser("cf", help="continued-fraction data of a rational")
    p_cf.add_argument("x", help="rational like 7/17")
    p_cf.set_defaults(func=_cmd_cf)

    p_eval = sub.add_parser("eval", help="evaluate a form at a rational")
    p_eval.add_argument("form", help="kontsevich | phistar | cot | delta | akd")
    p_eval.add_argument("x", help="rational like 1/2")
    p_eval.add_argument("--params", help="comma list key=value, e.g. a=-0.5+0.51i")
    p_eval.add_argument("--config", help="key=value file with default parameters")
    p_eval.set_defaults(func=_cmd_eval)

    p_scan = sub.add_parser("scan", help="residue scan to CSV")
    p_scan.add_argument("form", help="cot | kontsevich")
    p_scan.add_argument("--q", type=int, required=True)
    p_scan.add_argument("--norm", default="raw", help="raw | qk")
    p_scan.add_argument("--out", required=True)
    p_scan.add_argument("--params")
    p_scan.add_argument("--config")
    p_scan.set_defaults(func=_cmd_scan)

    p_ecdf = sub.add_parser("ecdf", help="project a sample CSV to an ECDF CSV")
    p_ecdf.add_argument("--in", dest="infile", required=True)
    p_ecdf.add_argument("--angle", type=float, default=0.0)
    p_ecdf.add_argument("--out", required=True)
    p_ecdf.set_defaults(func=_cmd_ecdf)

    p_fig = sub.add_parser("figure", help="write figure CSV + SVG")
    p_fig.add_argument("name", help="fig1 | fig3a | fig3b | fig4:<a-h>")
    p_fig.add_argument("--out", required=True, help="output directory")
    p_fig.set_defaults(func=_cmd_figure)

    p_check = sub.add_parser("check", help="run invariant suites")
    p_check.add_argument("suite", nargs="?", default="all",
                         help="cfcore | engine | forms | distribution | all")
    p_check.set_defaults(func=_cmd_check)

    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
