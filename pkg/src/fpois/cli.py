"""Command-line front end: ``fpois <command> --input job.json``.

Exit codes: 0 all checks pass, 1 a check failed, 2 input error,
3 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

from .courant import CheckResult, morita_witness, residual_check, self_equivalence
from .kernel import ConsistencyError, DomainError, FormalSeries, Poly, parse_poly
from .solver import classifying_action
from .structures import (FormalPoisson, bivector_series, form_series, gauge,
                         is_closed, jacobi_residual)
from . import suites

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

COMMANDS = ("jacobi", "gauge", "self-equiv", "classify", "morita", "homotopy-check", "fuzz")


class InputError(ValueError):
    pass


@dataclass
class JobSpec:
    command: str
    dimension: int
    truncation_order: int
    pi: list[dict] = field(default_factory=list)
    B: list[dict] = field(default_factory=list)
    seed: int = 0

    @property
    def base(self) -> tuple[str, ...]:
        return tuple(f"q{i + 1}" for i in range(self.dimension))

    def echo(self) -> dict:
        return {"command": self.command, "dimension": self.dimension, "truncation_order": self.truncation_order,
                "seed": self.seed, "pi": self.pi, "B": self.B}


def _int(doc: dict, key: str, default=None) -> int:
    v = doc.get(key, default)
    if v is None:
        raise InputError(f"missing field {key!r}")
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError(f"field {key!r} must be an integer")
    return v


def load_job(command: str, path: str | None, order: int | None, seed: int | None) -> JobSpec:
    doc: dict[str, Any] = {}
    if path is not None:
        try:
            text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
            doc = json.loads(text)
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise InputError("job spec must be a JSON object")
    elif command not in ("homotopy-check", "fuzz"):
        raise InputError(f"{command} needs --input")
    if "command" in doc and doc["command"] != command:
        raise InputError(f"job spec is for {doc['command']!r}, not {command!r}")
    n = _int(doc, "dimension", 3 if not doc else None)
    N = order if order is not None else _int(doc, "truncation_order", 2 if not doc else None)
    if n < 1:
        raise InputError("dimension must be at least 1")
    if N < 1:
        raise InputError("truncation_order must be at least 1")
    s = seed if seed is not None else _int(doc, "seed", 0)
    if not 0 <= s < 2 ** 64:
        raise InputError("seed must be an unsigned 64-bit integer")
    job = JobSpec(command, n, N, doc.get("pi", []), doc.get("B", []), s)
    for key in ("pi", "B"):
        if not isinstance(getattr(job, key), list):
            raise InputError(f"field {key!r} must be a list")
    return job


def _degree_cap() -> int | None:
    raw = os.environ.get("FPOIS_MAX_DEGREE")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise InputError("FPOIS_MAX_DEGREE must be an integer") from None


def _parse_tensor(job: JobSpec, entries: list[dict], what: str, cls) -> FormalSeries:
    n, N = job.dimension, job.truncation_order
    names = job.base
    cap = _degree_cap()
    orders: dict[int, dict] = {}
    for e in entries:
        if not isinstance(e, dict):
            raise InputError(f"{what} entries must be objects")
        k = _int(e, "order")
        if k < 0:
            raise InputError(f"{what}: negative order")
        terms = e.get("terms", [])
        if not isinstance(terms, list):
            raise InputError(f"{what}: terms must be a list")
        for t in terms:
            if not isinstance(t, dict):
                raise InputError(f"{what}: term must be an object")
            i, j = _int(t, "i"), _int(t, "j")
            if not (1 <= i <= n and 1 <= j <= n):
                raise InputError(f"{what}: index out of range 1..{n}")
            if i == j:
                raise InputError(f"{what}: repeated index {i}")
            raw = t.get("coeff", "1")
            try:
                c = parse_poly(str(raw), names)
            except DomainError as exc:
                raise InputError(f"{what}: {exc}") from None
            if cap is not None and c.degree() > cap:
                raise InputError(f"{what}: coefficient degree {c.degree()} exceeds FPOIS_MAX_DEGREE={cap}")
            if k > N:
                continue  # truncated away
            comps = orders.setdefault(k, {})
            key = (i - 1, j - 1) if i < j else (j - 1, i - 1)
            c = c if i < j else -c
            comps[key] = comps.get(key, Poly.zero(names)) + c
    return cls(names, N, orders)


def job_pi(job: JobSpec) -> FormalSeries:
    return _parse_tensor(job, job.pi, "pi", bivector_series)


def job_B(job: JobSpec) -> FormalSeries:
    return _parse_tensor(job, job.B, "B", form_series)


# ---------------------------------------------------------------------------


@dataclass
class Report:
    job: JobSpec
    outputs: dict[str, Any] = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    timing: float | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> str | None:
        return next((c.name for c in self.checks if not c.passed), None)

    def to_dict(self) -> dict:
        d = {
            "command": self.job.echo(),
            "pass": self.passed,
            "first_failure": self.first_failure(),
            "outputs": self.outputs,
            "checks": [c.to_dict() for c in self.checks],
            "notes": self.notes,
        }
        if self.timing is not None:
            d["timing_seconds"] = round(self.timing, 3)
        return d

    def to_text(self) -> str:
        j = self.job
        lines = [f"fpois {j.command}  dimension={j.dimension} truncation_order={j.truncation_order} seed={j.seed}"]
        for k, v in self.outputs.items():
            if isinstance(v, list):
                lines.append(f"{k}:")
                lines += [f"  {x}" for x in v]
            else:
                lines.append(f"{k}: {v}")
        for c in self.checks:
            tail = f"  ({c.detail})" if c.detail else ""
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}{tail}")
            for key, r in c.residuals.items():
                lines.append(f"    {key}: {r}")
        for note in self.notes:
            lines.append(f"note: {note}")
        if self.timing is not None:
            lines.append(f"timing: {self.timing:.3f}s")
        fail = self.first_failure()
        lines.append("result: PASS" if fail is None else f"result: FAIL (first failing check: {fail})")
        return "\n".join(lines) + "\n"


def _poisson(job: JobSpec) -> FormalPoisson:
    pi = job_pi(job)
    res = jacobi_residual(pi)
    if res:
        raise InputError(f"pi is not formal Poisson: [pi, pi] = {res.text()}")
    return FormalPoisson(pi, check=False)


def _closed_B(job: JobSpec) -> FormalSeries:
    B = job_B(job)
    if not is_closed(B):
        raise InputError("B is not closed")
    return B


def cmd_jacobi(job: JobSpec, report: Report) -> None:
    pi = job_pi(job)
    res = jacobi_residual(pi)
    report.outputs["pi"] = pi.text()
    report.outputs["jacobi_residual"] = res.text()
    report.checks.append(residual_check("jacobi", {"[pi, pi]": res}))


def cmd_gauge(job: JobSpec, report: Report) -> None:
    pi, B = _poisson(job), _closed_B(job)
    plus, minus = gauge(pi, B), gauge(pi, -B)
    report.outputs["pi"] = pi.pi.text()
    report.outputs["tau_B(pi)"] = plus.pi.text()
    report.outputs["tau_-B(pi)"] = minus.pi.text()
    report.checks.append(residual_check("jacobi", {"tau_B": jacobi_residual(plus), "tau_-B": jacobi_residual(minus)}))
    report.checks.append(residual_check("inverse", {"tau_-B(tau_B(pi)) - pi": gauge(plus, -B).pi - pi.pi}))


def cmd_self_equiv(job: JobSpec, report: Report) -> None:
    pi = _poisson(job)
    se = self_equivalence(pi)
    report.outputs["Z"] = se.Z.text()
    report.outputs["omega"] = se.omega.omega.text()
    report.outputs["theta_k"] = [f"theta_{k} = {t}" for k, t in enumerate(se.potentials) if k >= 1]
    report.checks += se.report.checks
    report.notes += se.report.notes


def cmd_classify(job: JobSpec, report: Report) -> None:
    pi, B = _poisson(job), _closed_B(job)
    r = classifying_action(B, pi)
    report.outputs["pi_B"] = r.pi_B.pi.text()
    report.outputs["residual_cochains"] = [f"R_{k + 1} = {R}" for k, R in enumerate(r.morphism.residual_report)]
    report.checks.append(CheckResult("cocycle_conditions", True, detail="every R_{k+1} and D_i was delta-closed"))
    for name, res in r.residuals.items():
        report.checks.append(residual_check(name, res))
    report.checks.append(residual_check("jacobi", {"[pi_B, pi_B]": jacobi_residual(r.pi_B)}))
    report.checks.append(residual_check("vanishing_order0", {"(pi_B)_0": r.pi_B.pi[0]} if r.pi_B.pi[0] else {}))
    d1 = r.pi_B.pi[1] - pi.pi[1]
    report.checks.append(residual_check("first_order", {"(pi_B)_1 - pi_1": d1} if d1 else {}))


def cmd_morita(job: JobSpec, report: Report) -> None:
    pi, B = _poisson(job), _closed_B(job)
    w = morita_witness(pi, B)
    report.outputs["tau_-B(pi)"] = w.pi_tilde.pi.text()
    report.outputs["Z"] = w.Z.text()
    report.outputs["omega_B"] = w.omega_B.omega.text()
    report.checks += w.report.checks
    report.notes += w.report.notes


DEFAULT_CASES = {"homotopy-check": 40, "fuzz": 5}


def _run_suite(job: JobSpec, report: Report, suite: str, names: list[str], cases: int, workers: int) -> None:
    tasks = [(suite, name, job.seed, i) for name in names for i in range(cases)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(suites.run_case, tasks, chunksize=4))
    else:
        results = [suites.run_case(t) for t in tasks]
    by_name: dict[str, list] = {name: [] for name in names}
    for name, idx, ok, detail in results:
        by_name[name].append((idx, ok, detail))
    for name in names:
        rows = sorted(by_name[name])
        bad = {f"case {i}": d for i, ok, d in rows if not ok}
        report.checks.append(CheckResult(name, not bad, bad, f"{len(rows)} cases"))


def cmd_homotopy_check(job: JobSpec, report: Report, cases: int, workers: int, only: list[str] | None) -> None:
    names = only or list(suites.HOMOTOPY_SUITE)
    _run_suite(job, report, "homotopy", names, cases, workers)


def cmd_fuzz(job: JobSpec, report: Report, cases: int, workers: int, only: list[str] | None) -> None:
    names = only or list(suites.FUZZ_SUITE)
    _run_suite(job, report, "fuzz", names, cases, workers)


HANDLERS = {
    "jacobi": cmd_jacobi,
    "gauge": cmd_gauge,
    "self-equiv": cmd_self_equiv,
    "classify": cmd_classify,
    "morita": cmd_morita,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fpois", description="Exact verification of formal Poisson constructions.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", metavar="PATH", help="JSON job spec ('-' for stdin)")
    p.add_argument("--order", type=int, metavar="N", help="override the truncation order")
    p.add_argument("--seed", type=int, metavar="U64", help="seed for randomized suites")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--check", nargs="+", metavar="NAME", help="only evaluate/report these checks")
    p.add_argument("--cases", type=int, metavar="K", help="random cases per check (homotopy-check, fuzz)")
    p.add_argument("--jobs", type=int, default=1, metavar="W", help="worker processes for randomized suites")
    p.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte-determinism)")
    return p


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        job = load_job(args.command, args.input, args.order, args.seed)
        report = Report(job)
        if args.command in HANDLERS:
            HANDLERS[args.command](job, report)
            if args.check:
                known = [c.name for c in report.checks]
                unknown = [c for c in args.check if c not in known]
                if unknown:
                    raise InputError(f"unknown check(s) {unknown}; available: {known}")
                report.checks = [c for c in report.checks if c.name in args.check]
        else:
            suite = suites.HOMOTOPY_SUITE if args.command == "homotopy-check" else suites.FUZZ_SUITE
            if args.check:
                unknown = [c for c in args.check if c not in suite]
                if unknown:
                    raise InputError(f"unknown check(s) {unknown}; available: {list(suite)}")
            cases = args.cases if args.cases is not None else DEFAULT_CASES[args.command]
            if cases < 1 or args.jobs < 1:
                raise InputError("--cases and --jobs must be positive")
            fn = cmd_homotopy_check if args.command == "homotopy-check" else cmd_fuzz
            fn(job, report, cases, args.jobs, args.check)
    except (InputError, DomainError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConsistencyError, AssertionError) as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.timing:
        report.timing = time.perf_counter() - start
    if args.format == "structured":
        out.write(json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(report.to_text())
    if not report.passed:
        print(f"check failed: {report.first_failure()}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS


def main() -> None:
    try:
        code = run()
    except Exception as exc:  # anything unexpected is an internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = EXIT_INTERNAL
    sys.exit(code)
