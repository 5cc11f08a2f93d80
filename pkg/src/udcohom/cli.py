"""Command-line front end: config parsing, verification suites and reports."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .anderson import augmentation_rank, build_L, first_filtration_E1, homology_of_L
from .distribution import (OrderIdeal, basis, inclusion_matrix, verify_theorem_b, xg_basis_matrix,
                           xg_family)
from .errors import BadModulus, BadPrime, ParseError, UdcohomError, ValidationError
from .exactlin import CohomologyGroup, determinant, invariant_factors
from .galois import PrimeConfig, make_config, subsets
from .signs import multi_indices, supp

CHECKS = ("anderson", "appendix", "cup", "lift", "quasi-iso", "theorem-a", "theorem-b")


@dataclass
class RunConfig:
    primes: tuple[int, ...]
    modulus: int = 0
    n_max: int = 2
    ideal: tuple[tuple[int, ...], ...] | None = None
    checks: tuple[str, ...] = CHECKS
    out: str | None = None

    @property
    def r(self) -> int:
        out = 1
        for p in self.primes:
            out *= p
        return out

    def prime_config(self) -> PrimeConfig:
        return make_config(self.primes, max(self.modulus, 1))

    def order_ideal(self, cfg: PrimeConfig) -> OrderIdeal | None:
        if self.ideal is None:
            return None
        return OrderIdeal.from_primes(cfg, self.ideal)

    def to_json(self) -> dict:
        return {
            "primes": list(self.primes),
            "modulus": self.modulus,
            "n_max": self.n_max,
            "ideal": None if self.ideal is None else [list(x) for x in self.ideal],
            "checks": list(self.checks),
        }


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

class _ValueParser:
    """Bracketed lists of integers and bare words, e.g. [[3], [7, 13]] or [theorem-a, cup]."""

    def __init__(self, text: str, line: int, offset: int):
        self.text = text
        self.pos = 0
        self.line = line
        self.offset = offset

    def error(self, msg):
        raise ParseError(msg, self.line, self.offset + self.pos + 1)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def parse(self):
        self.skip()
        value = self.value()
        self.skip()
        if self.pos != len(self.text):
            self.error(f"unexpected {self.text[self.pos]!r}")
        return value

    def value(self):
        self.skip()
        if self.pos >= len(self.text):
            self.error("missing value")
        if self.text[self.pos] == "[":
            return self.list()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in ",] \t[":
            self.pos += 1
        word = self.text[start:self.pos]
        if not word:
            self.error(f"unexpected {self.text[self.pos]!r}")
        try:
            return int(word)
        except ValueError:
            return word

    def list(self):
        self.pos += 1
        items = []
        self.skip()
        if self.pos < len(self.text) and self.text[self.pos] == "]":
            self.pos += 1
            return items
        while True:
            items.append(self.value())
            self.skip()
            if self.pos >= len(self.text):
                self.error("unterminated list")
            c = self.text[self.pos]
            if c not in ",]":
                self.error(f"expected ',' or ']', got {c!r}")
            self.pos += 1
            if c == "]":
                return items


def _parse_key_values(text: str) -> dict:
    out = {}
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError("expected key=value", k, len(line) - len(line.lstrip()) + 1)
        eq = line.index("=")
        key = line[:eq].strip()
        if not key:
            raise ParseError("empty key", k, 1)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", k, 1)
        out[key] = _ValueParser(line[eq + 1:], k, eq + 1).parse()
    return out


def _as_int(name, v, minimum=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError(f"{name} must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {v}")
    return v


def validate(raw: dict) -> RunConfig:
    known = {"primes", "modulus", "n_max", "ideal", "checks", "out"}
    extra = set(raw) - known
    if extra:
        raise ValidationError(f"unknown keys: {sorted(extra)}")
    if "primes" not in raw:
        raise ValidationError("primes is required")
    primes = raw["primes"]
    if isinstance(primes, int):
        primes = [primes]
    if not isinstance(primes, list) or not primes:
        raise ValidationError("primes must be a non-empty list")
    primes = tuple(sorted(_as_int("prime", p) for p in primes))
    M = _as_int("modulus", raw.get("modulus", 0), 0)
    n_max = _as_int("n_max", raw.get("n_max", 2), 0)
    try:
        make_config(primes, max(M, 1))
    except (BadPrime, BadModulus) as exc:
        raise ValidationError(str(exc)) from None
    ideal = raw.get("ideal")
    if ideal is not None:
        if not isinstance(ideal, list) or not all(isinstance(x, list) for x in ideal):
            raise ValidationError("ideal must be a list of prime lists, e.g. [[3], [7]]")
        for group in ideal:
            for p in group:
                if p not in primes:
                    raise ValidationError(f"ideal mentions {p}, which is not among {list(primes)}")
        ideal = tuple(tuple(sorted(_as_int("prime", p) for p in g)) for g in ideal)
    checks = raw.get("checks", ["all"])
    if isinstance(checks, str):
        checks = [checks]
    if not isinstance(checks, list):
        raise ValidationError("checks must be a list")
    names = set()
    for c in checks:
        if c == "all":
            names.update(CHECKS)
        elif c in CHECKS:
            names.add(c)
        else:
            raise ValidationError(f"unknown check {c!r}; choose from {['all', *CHECKS]}")
    out = raw.get("out")
    if out is not None and not isinstance(out, str):
        raise ValidationError("out must be a path")
    return RunConfig(primes, M, n_max, ideal, tuple(sorted(names)), out)


def parse_config(text: str) -> RunConfig:
    """key=value lines (bracketed lists allowed) or a JSON object."""
    if text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        if not isinstance(raw, dict):
            raise ParseError("JSON config must be an object", 1, 1)
    else:
        raw = _parse_key_values(text)
    return validate(raw)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def _group(H: CohomologyGroup) -> str:
    return str(H)


def _record(name, inputs, computed, expected, provenance, passed) -> dict:
    return {"name": name, "inputs": inputs, "computed": computed, "expected": expected,
            "provenance": provenance, "pass": bool(passed)}


def _ideal_label(cfg: PrimeConfig, ideal: OrderIdeal | None):
    return None if ideal is None else ideal.prime_lists(cfg)


def suite_anderson(run: RunConfig, cfg: PrimeConfig) -> list[dict]:
    out = []
    ideals = [None] if run.ideal is None else [None, run.order_ideal(cfg)]
    for ideal in ideals:
        L = build_L(cfg, ideal)
        H = homology_of_L(L)
        rank = augmentation_rank(cfg, L.ideal)
        label = "full" if ideal is None else "ideal"
        inputs = {"r": cfg.r, "ideal": _ideal_label(cfg, ideal), "sizes": list(L.sizes())}
        for p in L.degrees:
            expected = CohomologyGroup(rank, ()) if p == 0 else CohomologyGroup()
            out.append(_record(f"anderson/{label}/H{p}", inputs, _group(H[p]), _group(expected),
                               "derived: augmentation rank", H[p] == expected))
        rows = first_filtration_E1(L)
        out.append(_record(f"anderson/{label}/E1", inputs,
                           {str(row.p2): row.rank for row in rows},
                           {str(row.p2): row.predicted_rank for row in rows},
                           "derived: rank differences of U_S(I(k))",
                           all(row.concentrated for row in rows)))
    return out


def suite_theorem_a(run: RunConfig, cfg: PrimeConfig) -> list[dict]:
    from .cohomology import verify_theorem_A
    ideal = run.order_ideal(cfg)
    report = verify_theorem_A(cfg, run.n_max, ideal)
    return [_record(f"theorem-a/degree-{row.degree}",
                    {"r": cfg.r, "ideal": _ideal_label(cfg, ideal), "degree": row.degree},
                    _group(row.computed), _group(row.predicted),
                    "derived: A_e closed form", row.passed)
            for row in report.rows]


def suite_theorem_b(run: RunConfig, cfg: PrimeConfig) -> list[dict]:
    M = run.modulus
    if M < 2:
        return [_record("theorem-b", {"r": cfg.r, "modulus": M}, "skipped: needs modulus >= 2",
                        None, "not applicable", True)]
    rep = verify_theorem_b(cfg.r, M)
    family = {str(d): repr(x) for d, x in rep.family}
    return [
        _record("theorem-b/family", {"r": cfg.r, "modulus": M}, family, None, "derived: D_T elements",
                rep.fixed and rep.independent),
        _record("theorem-b/fixed", {"r": cfg.r, "modulus": M}, rep.fixed, True, "derived", rep.fixed),
        _record("theorem-b/independent", {"r": cfg.r, "modulus": M}, rep.independent, True, "derived",
                rep.independent),
        _record("theorem-b/spans", {"r": cfg.r, "modulus": M}, rep.spans, True, "derived", rep.spans),
        _record("theorem-b/order", {"r": cfg.r, "modulus": M}, rep.module.order, rep.expected_order,
                "derived: M^(2^s)", rep.module.order == rep.expected_order),
    ]


def suite_cup(run: RunConfig, cfg: PrimeConfig) -> list[dict]:
    from .cohomology import check_cup, cup_closed_form, cup_via_diagonal
    M = run.modulus
    if M < 2:
        return [_record("cup", {"r": cfg.r, "modulus": M}, "skipped: needs modulus >= 2",
                        None, "not applicable", True)]
    out = []
    low = [e for d in range(3) for e in multi_indices(cfg.s, d)]
    for e in low:
        for f in low:
            if sum(e) + sum(f) == 0 or sum(e) > 2 or sum(f) > 2:
                continue
            closed = cup_closed_form(cfg, M, e, f)
            diag = cup_via_diagonal(cfg, M, e, f)
            out.append(_record(f"cup/trivial/{list(e)}x{list(f)}", {"e": list(e), "e'": list(f), "modulus": M},
                               {"coefficient": diag[0], "degree": list(diag[1])},
                               {"coefficient": closed[0], "degree": list(closed[1])},
                               "derived: diagonal evaluation", diag == closed))
    top = min(run.n_max, 2)
    for T in subsets(cfg.s):
        for d in range(len(T), len(T) + top + 1):
            for e in multi_indices(cfg.s, d):
                if not T <= supp(e):
                    continue
                for ep in multi_indices(cfg.s, 1):
                    if d - len(T) + 1 > top:
                        continue
                    res = check_cup(cfg, M, T, e, ep)
                    Tl = [cfg.primes[i] for i in sorted(T)]
                    residual = {f"{[cfg.primes[i] for i in sorted(k[0])]}{list(k[1])}": v
                                for k, v in sorted(res.residual.items(), key=lambda kv: (sorted(kv[0][0]), kv[0][1]))}
                    out.append(_record(
                        f"cup/class/T={Tl}/e={list(e)}/e'={list(ep)}",
                        {"T": Tl, "e": list(e), "e'": list(ep), "modulus": M},
                        {"coefficient": res.coefficient, "matches": res.matches, "lower terms": residual},
                        {"coefficient": res.readings["graded"], "readings": res.readings},
                        "derived: coboundary solve in Hom(P, U/MU)", res.passed))
    return out


def suite_quasi_iso(run: RunConfig, cfg: PrimeConfig) -> list[dict]:
    from .cohomology import verify_degeneration, verify_modM_counts, verify_quasi_iso
    M = run.modulus
    ideal = run.order_ideal(cfg)
    rep = verify_quasi_iso(cfg, M, run.n_max, ideal)
    inputs = {"r": cfg.r, "modulus": M, "ideal": _ideal_label(cfg, ideal)}
    out = [_record(f"quasi-iso/degree-{row.degree}", dict(inputs, degree=row.degree),
                   _group(row.computed), _group(row.predicted), "derived: Hom(P, U)", row.passed)
           for row in rep.rows]
    for key, value in sorted(rep.extra.items()):
        out.append(_record(f"quasi-iso/{key.replace(' ', '-')}", inputs, value, True, "derived", value))
    if M >= 2:
        for row in verify_modM_counts(cfg, M, run.n_max, ideal):
            out.append(_record(f"quasi-iso/count-{row.degree}", dict(inputs, degree=row.degree),
                               {"group": _group(row.group)}, {"order": f"{M}^{row.count}"},
                               "derived: #(T, e) count", row.passed))
        if ideal is None:
            for row in verify_degeneration(cfg, M, run.n_max):
                out.append(_record(f"quasi-iso/degeneration-{row.degree}", dict(inputs, degree=row.degree),
                                   {"rows": {str(k): v for k, v in row.row_orders.items()},
                                    "total": row.total_order},
                                   {"rows": {str(k): M ** v for k, v in row.row_counts.items()}},
                                   "derived: (T, e_T) count per row", row.passed))
    return out


def suite_lift(run: RunConfig, cfg: PrimeConfig) -> list[dict]:
    from .cohomology import lift_cocycle, prime_lift_report
    from .cohomology.complexes import build_K
    M = run.modulus
    if M < 2:
        return [_record("lift", {"r": cfg.r, "modulus": M}, "skipped: needs modulus >= 2",
                        None, "not applicable", True)]
    out = []
    K = build_K(cfg, M, None, min(run.n_max, 2))
    for T in subsets(cfg.s):
        Tl = [cfg.primes[i] for i in sorted(T)]
        rep = prime_lift_report(cfg, M, T, K)
        out.append(_record(f"lift/prime/T={Tl}", {"T": Tl, "modulus": M},
                           {"closed": rep.closed, "signs": rep.signs},
                           {"closed": True, "sign": rep.expected_sign},
                           "derived: D_T[sum 1/l] plus lower-order terms", rep.passed))
    ok, total = 0, 0
    for T in subsets(cfg.s):
        for d in range(len(T), len(T) + min(run.n_max, 2) + 1):
            for e in multi_indices(cfg.s, d):
                if T <= supp(e):
                    total += 1
                    try:
                        lift_cocycle(cfg, M, T, e, K)
                        ok += 1
                    except UdcohomError:
                        pass
    out.append(_record("lift/all", {"modulus": M, "n_max": min(run.n_max, 2)}, ok, total,
                       "derived: every Q-symbol lifts", ok == total))
    return out


APPENDIX_LEVELS = tuple(range(1, 13)) + (21,)


def suite_appendix(run: RunConfig, cfg: PrimeConfig) -> list[dict]:
    out = []
    for f in APPENDIX_LEVELS:
        for variant in ("X", "Y"):
            A = xg_basis_matrix(f, variant)
            det = determinant(A) if A.rows == A.cols else None
            out.append(_record(f"appendix/{variant}/f={f:02d}", {"f": f, "variant": variant},
                               {"size": len(xg_family(f)), "det": det}, {"size": f, "det": "+-1"},
                               "derived: unimodularity", len(xg_family(f)) == f and det in (1, -1)))
    r = cfg.r
    for g in range(1, r + 1):
        if r % g or r > 105:
            continue
        fs = invariant_factors(inclusion_matrix(g, r))
        out.append(_record(f"appendix/inclusion/{g}->{r}", {"g": g, "f": r},
                           {"rank": len(fs), "factors": sorted(set(fs))},
                           {"rank": len(basis(g)), "factors": [1] if basis(g) else []},
                           "derived: split monomorphism",
                           len(fs) == len(basis(g)) and all(x == 1 for x in fs)))
    return out


SUITES = {
    "anderson": suite_anderson,
    "appendix": suite_appendix,
    "cup": suite_cup,
    "lift": suite_lift,
    "quasi-iso": suite_quasi_iso,
    "theorem-a": suite_theorem_a,
    "theorem-b": suite_theorem_b,
}


@dataclass
class Report:
    config: RunConfig
    results: list[dict] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r["pass"] for r in self.results)


def run_checks(run: RunConfig) -> Report:
    """Run the requested suites; engine errors become failed records."""
    cfg = run.prime_config()
    report = Report(run)
    for name in sorted(run.checks):
        start = time.perf_counter()
        try:
            records = SUITES[name](run, cfg)
        except (UdcohomError, ValueError, ArithmeticError) as exc:
            records = [_record(name, run.to_json(), f"error: {type(exc).__name__}: {exc}", None,
                               "engine error", False)]
        report.timings[name] = time.perf_counter() - start
        report.results.extend(records)
    report.results.sort(key=lambda r: r["name"])
    return report


def emit_report(report: Report, fmt: str = "json", timings: bool = False) -> str:
    """Deterministic serialisation; wall times only appear when asked for, under meta."""
    meta = {"version": __version__, "config": report.config.to_json()}
    if timings:
        meta["timings"] = {k: round(v, 3) for k, v in sorted(report.timings.items())}
    if fmt == "json":
        return json.dumps({"meta": meta, "results": report.results}, indent=2, sort_keys=True) + "\n"
    if fmt != "markdown":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"# udcohom report (version {__version__})", ""]
    c = report.config
    lines.append(f"primes {list(c.primes)}, modulus {c.modulus}, n_max {c.n_max}, "
                 f"ideal {c.ideal if c.ideal is None else [list(x) for x in c.ideal]}")
    lines.append("")
    if timings:
        for k, v in meta["timings"].items():
            lines.append(f"- time {k}: {v} s")
        lines.append("")
    lines += ["| check | computed | expected | pass |", "|---|---|---|---|"]
    for r in report.results:
        comp = json.dumps(r["computed"], sort_keys=True).replace("|", "\\|")
        exp = json.dumps(r["expected"], sort_keys=True).replace("|", "\\|")
        lines.append(f"| {r['name']} | {comp} | {exp} | {'yes' if r['pass'] else 'NO'} |")
    lines.append("")
    lines.append(f"overall: {'pass' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argparse
# ---------------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    text = text.strip().strip("[]")
    return [int(x) for x in text.replace(",", " ").split()]


def _ideal_arg(text: str):
    v = _ValueParser(text, 1, 0).parse()
    if not isinstance(v, list):
        raise argparse.ArgumentTypeError("ideal must look like [[3],[7]]")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--primes", type=_int_list, help="odd primes, e.g. 3,7 or [3,7]")
    common.add_argument("--modulus", type=int, help="M (0 for integer coefficients)")
    common.add_argument("--n-max", dest="n_max", type=int, help="highest cohomological degree")
    common.add_argument("--ideal", type=_ideal_arg, help="maximal sets as prime lists, e.g. [[3],[7]]")
    common.add_argument("--checks", help="comma-separated subset of " + ",".join(("all",) + CHECKS))
    common.add_argument("--format", choices=("json", "markdown", "text"), default=None)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--config", help="config file; its values override flags")
    common.add_argument("--timings", action="store_true", help="include wall times in the report meta")

    parser = argparse.ArgumentParser(prog="udcohom", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("basis", parents=[common], help="canonical basis of U_r")
    sub.add_parser("cohomology", parents=[common], help="H^n(G_r, U_r) or H^n(G_r, U_r/M)")
    sub.add_parser("verify", parents=[common], help="run checks, one line per result")
    sub.add_parser("lift", parents=[common], help="explicit cocycles and their evaluations")
    sub.add_parser("cup", parents=[common], help="cup-product checks")
    sub.add_parser("report", parents=[common], help="full report document")
    return parser


def config_from_args(args) -> RunConfig:
    raw = {}
    if args.primes is not None:
        raw["primes"] = args.primes
    if args.modulus is not None:
        raw["modulus"] = args.modulus
    if args.n_max is not None:
        raw["n_max"] = args.n_max
    if args.ideal is not None:
        raw["ideal"] = args.ideal
    if args.checks is not None:
        raw["checks"] = [c.strip() for c in args.checks.split(",") if c.strip()]
    if args.out is not None:
        raw["out"] = args.out
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
        if text.lstrip().startswith("{"):
            try:
                file_raw = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        else:
            file_raw = _parse_key_values(text)
        raw.update(file_raw)
    return validate(raw)


def _basis_text(run: RunConfig) -> str:
    cfg = run.prime_config()
    ideal = run.order_ideal(cfg)
    items = [a for a in basis(cfg.r) if ideal is None or cfg.support(a.numerator) in ideal]
    lines = [f"U_{cfg.r}: rank {len(items)}"]
    lines += [f"  [{a}]  support {[cfg.primes[i] for i in sorted(cfg.support(a.numerator))]}" for a in items]
    return "\n".join(lines) + "\n"


def _cohomology_text(run: RunConfig) -> str:
    from .cohomology import hom_P_U, theorem_a_prediction
    cfg = run.prime_config()
    ideal = run.order_ideal(cfg)
    U = hom_P_U(cfg, run.modulus, run.n_max, ideal)
    coeff = f"U_{cfg.r}" + (f"/{run.modulus}" if run.modulus else "")
    lines = []
    for n in range(run.n_max + 1):
        H = U.homology(n)
        line = f"H^{n}(G_{cfg.r}, {coeff}) = {H}"
        if not run.modulus:
            line += f"   (closed form {theorem_a_prediction(cfg, n, ideal)})"
        lines.append(line)
    return "\n".join(lines) + "\n"


def _lines(report: Report) -> str:
    out = []
    for r in report.results:
        out.append(f"{'PASS' if r['pass'] else 'FAIL'}  {r['name']}  computed={json.dumps(r['computed'], sort_keys=True)}")
    out.append(f"{sum(r['pass'] for r in report.results)}/{len(report.results)} passed")
    return "\n".join(out) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = config_from_args(args)
    except (ParseError, ValidationError) as exc:
        print(f"udcohom: {exc}", file=sys.stderr)
        return 2
    fmt = args.format
    status = 0
    if args.command == "basis":
        text = _basis_text(run)
    elif args.command == "cohomology":
        text = _cohomology_text(run)
    else:
        if args.command in ("lift", "cup"):
            run.checks = (args.command,)
        report = run_checks(run)
        status = 0 if report.passed else 1
        if args.command == "report":
            text = emit_report(report, fmt or "json", args.timings)
        elif fmt in ("json", "markdown"):
            text = emit_report(report, fmt, args.timings)
        else:
            text = _lines(report)
    if run.out:
        with open(run.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
