"""Command line: K-groups, class groups, oracles, property suites and nerve homology.

Every command builds a job (a flat JSON-able dict), runs it through
:func:`run` and prints a report.  Reports carry ``"schema": 1``, an echo of
the job, the result, the concepts the computation rests on, and wall-clock
timing.  Timing is the only field allowed to differ between two runs of the
same job; :func:`canonical` drops it.

Exit codes: 0 success, 2 ``NOT_STABILIZED``, 3 unsupported input, 1 other.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import chains, ideles, katocx, milnor, rng
from .abgroup import PresentedGroup
from .bilaurent import TwoLocalField
from .errors import GoldenMismatch, HicftError, InvalidJob, NotStabilized, UnsupportedInput
from .gf import fq
from .laurent import LaurentField

SCHEMA = 1

ANCHORS = {
    "kgroup": ["Milnor K-group K^M_r", "tame symbol", "Steinberg relation"],
    "classgroup/p1": [
        "Parshin chain on the pair",
        "idele group I(X,D)",
        "Q-map",
        "idele class group C(X,D)",
    ],
    "classgroup/local_surface": [
        "Parshin chain on the pair",
        "two-dimensional local field",
        "Q-map",
        "idele class group C(X',D')",
    ],
    "oracle/ray-class": ["ray class group"],
    "verify/weil": ["tame symbol", "Weil reciprocity"],
    "verify/local-surface": ["tame symbol", "reciprocity along (m,(s),eta) and (m,(t),eta)"],
    "verify/steinberg": ["Steinberg relation", "Milnor K-group K^M_r"],
    "verify/tame": ["tame symbol"],
    "kato-homology": ["nerve complex C(Y., Z/n)", "Kato complex"],
    "report": ["nerve complex C(Y., Z/n)", "reciprocity map"],
}

EXIT_OK, EXIT_ERROR, EXIT_NOT_STABILIZED, EXIT_UNSUPPORTED = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# validation helpers


def _need(job: dict, key: str):
    if job.get(key) is None:
        raise InvalidJob(f"job is missing {key!r}")
    return job[key]


def _positive(job: dict, key: str, default=None, minimum: int = 1) -> int:
    v = job.get(key, default)
    if v is None:
        raise InvalidJob(f"job is missing {key!r}")
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise InvalidJob(f"{key} must be an integer >= {minimum}, got {v!r}")
    return v


def _seed(job: dict) -> int:
    s = job.get("seed")
    if s is None:
        raise InvalidJob("randomized verifications need a seed")
    if isinstance(s, bool) or not isinstance(s, int) or not 0 <= s < 2**64:
        raise InvalidJob("seed must be an unsigned 64-bit integer")
    return s


def _model(job: dict):
    scheme = job.get("scheme", "p1")
    F = fq(_positive(job, "q", minimum=2))
    if scheme == "p1":
        return chains.CurveModel(F)
    if scheme in ("local_surface", "local-surface"):
        return chains.LocalSurfaceModel(F)
    raise InvalidJob(f"unknown scheme {scheme!r}")


def _divisor(model, text: str):
    F = model.field
    if isinstance(model, chains.CurveModel):
        return chains.parse_curve_divisor(F, text or "")
    return chains.parse_surface_divisor(F, text or "")


# ---------------------------------------------------------------------------
# commands


def _kgroup(job: dict) -> dict:
    r = _positive(job, "r", minimum=0)
    n = _positive(job, "n", minimum=2)
    K = milnor.field_from_spec(job.get("field", "fq"), _positive(job, "q", minimum=2), job.get("precision", 16))
    G = milnor.km_mod_n(K, r, n)
    out = {
        "invariant_factors": list(G.invariant_factors().factors),
        "method": milnor.km_method(K, r),
        "field": repr(K),
    }
    if not K.is_finite:
        out["generators"] = [
            {"symbol": g.format(), "order": m}
            for g, m in zip(milnor.generators(K, r, n), milnor.moduli(K, r, n))
        ]
    return out


def _classgroup(job: dict) -> dict:
    model = _model(job)
    D = _divisor(model, job.get("divisor", ""))
    n = _positive(job, "n", minimum=2)
    B = _positive(job, "degree_bound", default=ideles.DEFAULT_BOUND)
    N = _positive(job, "precision", default=ideles.DEFAULT_PRECISION)
    res = ideles.class_group(ideles.ClassGroupJob(model, D, n, B, N))
    out = res.to_json()
    out["divisor"] = D.to_json()
    out["chain_templates"] = [
        {"chain": c.format(), "kind": c.kind, "family": c.family}
        for c in chains.enumerate_chain_types(model, D)
    ]
    return out


def _oracle(job: dict) -> dict:
    kind = job.get("oracle", "ray-class")
    if kind != "ray-class":
        raise InvalidJob(f"unknown oracle {kind!r}")
    q = _positive(job, "q", minimum=2)
    F = fq(q)
    D = chains.parse_curve_divisor(F, job.get("divisor", ""))
    n = _positive(job, "n", minimum=2)
    B = job.get("degree_bound")
    res = ideles.ray_class_oracle(q, D, n, B)
    out = res.to_json()
    out["divisor"] = D.to_json()
    return out


def _suite_summary(trials: int, failures: list) -> dict:
    return {
        "trials": trials,
        "passed": trials - len(failures),
        "all_passed": not failures,
        "failures": failures[:10],
    }


def verify_weil(q: int, trials: int, seed: int, max_degree: int = 4) -> dict:
    F = fq(q)
    fails = []
    for i, g in enumerate(rng.trial_generators(seed, trials)):
        f1 = rng.random_function(F, max_degree, g)
        f2 = rng.random_function(F, max_degree, g)
        if not ideles.weil_reciprocity_check(q, f1, f2):
            fails.append({"trial": i, "f": f1.format(), "g": f2.format()})
    return _suite_summary(trials, fails)


def verify_local_surface(q: int, trials: int, seed: int) -> dict:
    F = fq(q)
    fails = []
    for i, g in enumerate(rng.trial_generators(seed, trials)):
        a = rng.random_bilaurent(F, g)
        b = rng.random_bilaurent(F, g)
        if not ideles.local_surface_reciprocity_check(q, a, b):
            fails.append({"trial": i, "f": a.format(), "g": b.format()})
    return _suite_summary(trials, fails)


def _tame_modulus(q: int) -> int:
    return q - 1 if q > 2 else 3


def steinberg_family(K: LaurentField) -> list:
    """Elements ``c t^k (1 + d t)`` with ``k`` in -1..1, as used by the Steinberg suite."""
    F = K.coeff
    return [K.series(k, [c, d]) for c in F.units() for k in (-1, 0, 1) for d in F.elements()]


def verify_steinberg(q: int, n: int | None = None) -> dict:
    """``{a,1-a}``, ``{a,-a}`` and ``{a,b}+{b,a}`` normalize to zero.

    Over ``F_q`` every pair of units is checked with the canonical normal
    form, and the presentation of ``K_2(F_q)`` by all symbols modulo
    bilinearity and Steinberg (no modulus) must collapse to zero.
    Over ``F_q((t))`` the family of :func:`steinberg_family` is checked.
    """
    F = fq(q)
    n = n or _tame_modulus(q)
    checks, fails = 0, []

    def check(label, x):
        nonlocal checks
        checks += 1
        if not milnor.steinberg_normalize(x, n).is_formally_zero():
            fails.append({"relation": label, "symbol": x.format()})

    for a in F.units():
        if a != 1:
            x = milnor.symbol(F, a, F.sub(1, a))
            check("{a,1-a}", x)
        x = milnor.symbol(F, a, F.neg(a))
        check("{a,-a}", x)
        for b in F.units():
            x = milnor.symbol(F, a, b) + milnor.symbol(F, b, a)
            check("{a,b}+{b,a}", x)
    closure_ok = None
    if q <= milnor.CLOSURE_MAX_Q:
        G = milnor.closure_group(F, 2, n)
        closure_ok = PresentedGroup(G.num_generators, G.sparse_relations(), None).is_trivial()
        if not closure_ok:
            fails.append({"relation": "closure", "symbol": "integral K_2 presentation"})
    K = LaurentField(F, "t", 8)
    fam = steinberg_family(K)
    small = [x for x in fam if x.coefficient(x.valuation + 1) == 0]
    for a in fam:
        if not K.is_one(a):
            check("{a,1-a}", milnor.symbol(K, a, K.one_minus(a)))
        check("{a,-a}", milnor.symbol(K, a, K.neg(a)))
        for b in small:
            check("{a,b}+{b,a}", milnor.symbol(K, a, b) + milnor.symbol(K, b, a))
    out = _suite_summary(checks, fails)
    out["modulus"] = n
    out["closure_presentation_ok"] = closure_ok
    return out


def _same(k, x, y) -> bool:
    if k.is_finite:
        return x == y
    return x.agrees_with(y)


def verify_tame(q: int, field: str, trials: int, seed: int, precision: int = 16) -> dict:
    """Additivity of the residue, vanishing on units, and agreement of the two routes."""
    F = fq(q)
    if field in ("laurent", "local"):
        K = LaurentField(F, "t", precision)

        def draw(g):
            return rng.random_laurent(K, g)

        def unit(g):
            return rng.random_laurent_unit(K, g)

    elif field in ("2local", "two-local"):
        K = TwoLocalField(F, "t", precision)

        def draw(g):
            return rng.random_bilaurent(F, g)

        def unit(g):
            return rng.random_bilaurent(F, g, vrange=0)

    else:
        raise InvalidJob(f"unknown field {field!r}")
    k = K.residue_field
    fails = []
    for i, g in enumerate(rng.trial_generators(seed, trials)):
        f1, f2, h = draw(g), draw(g), draw(g)
        u1, u2 = unit(g), unit(g)
        lhs = milnor.product_of(milnor.residue_symbol(milnor.symbol(K, K.mul(f1, f2), h)))
        rhs = k.mul(
            milnor.product_of(milnor.residue_symbol(milnor.symbol(K, f1, h))),
            milnor.product_of(milnor.residue_symbol(milnor.symbol(K, f2, h))),
        )
        problems = []
        if not _same(k, lhs, rhs):
            problems.append("additivity")
        if not milnor.residue_symbol(milnor.symbol(K, u1, u2)).is_formally_zero():
            problems.append("unit vanishing")
        for a, b in ((f1, h), (f2, h), (f1, f2)):
            route1 = milnor.product_of(milnor.residue_symbol(milnor.symbol(K, a, b)))
            route2 = milnor.tame_symbol(K, a, b)
            if not _same(k, route1, route2):
                problems.append("two routes")
                break
        if problems:
            fails.append({"trial": i, "problems": problems})
    out = _suite_summary(trials, fails)
    out["field"] = repr(K)
    return out


def _verify(job: dict) -> dict:
    kind = _need(job, "suite")
    q = _positive(job, "q", minimum=2)
    if kind == "weil":
        return verify_weil(q, _positive(job, "trials", 200), _seed(job), _positive(job, "max_degree", 4))
    if kind == "local-surface":
        return verify_local_surface(q, _positive(job, "trials", 100), _seed(job))
    if kind == "steinberg":
        n = job.get("n")
        return verify_steinberg(q, _positive(job, "n", minimum=2) if n is not None else None)
    if kind == "tame":
        return verify_tame(
            q,
            job.get("field", "laurent"),
            _positive(job, "trials", 500),
            _seed(job),
            _positive(job, "precision", 16),
        )
    raise InvalidJob(f"unknown suite {kind!r}")


def _config(job: dict) -> katocx.SNCConfig:
    cfg = _need(job, "config")
    if isinstance(cfg, dict):
        return katocx.SNCConfig.from_json(cfg)
    return katocx.SNCConfig.from_json(Path(cfg))


def _kato(job: dict) -> dict:
    cfg = _config(job)
    n = _positive(job, "n", minimum=2)
    cx = katocx.build_nerve_complex(cfg, n)
    degrees = job.get("degrees")
    if degrees is None:
        degrees = list(range(cx.top_degree + 1))
    hom = {str(a): list(katocx.homology(cx, a).invariant_factors().factors) for a in degrees}
    return {
        "homology": hom,
        "ranks": [cx.rank(a) for a in range(cx.top_degree + 1)],
        "euler_characteristic": katocx.euler_characteristic(cx),
        "d_squared_zero": True,
    }


def _report(job: dict) -> dict:
    return katocx.obstruction_report(_config(job), _positive(job, "n", minimum=2)).to_json()


COMMANDS = {
    "kgroup": _kgroup,
    "classgroup": _classgroup,
    "oracle": _oracle,
    "verify": _verify,
    "kato-homology": _kato,
    "report": _report,
}


def _anchor_key(job: dict) -> str:
    cmd = job["command"]
    if cmd == "classgroup":
        s = job.get("scheme", "p1")
        return f"classgroup/{'local_surface' if s.startswith('local') else 'p1'}"
    if cmd == "oracle":
        return f"oracle/{job.get('oracle', 'ray-class')}"
    if cmd == "verify":
        return f"verify/{job.get('suite')}"
    return cmd


def run(job: dict) -> dict:
    """Run one job and return its report; errors propagate."""
    cmd = job.get("command")
    if cmd not in COMMANDS:
        raise InvalidJob(f"unknown command {cmd!r}")
    start = time.perf_counter()
    result = COMMANDS[cmd](job)
    return {
        "schema": SCHEMA,
        "command": cmd,
        "input": job,
        "result": result,
        "anchors": ANCHORS.get(_anchor_key(job), []),
        "timing": {"wall_seconds": round(time.perf_counter() - start, 6)},
    }


def exit_code(err: BaseException) -> int:
    if isinstance(err, NotStabilized):
        return EXIT_NOT_STABILIZED
    if isinstance(err, UnsupportedInput):
        return EXIT_UNSUPPORTED
    return EXIT_ERROR


def execute(job: dict) -> tuple[dict, int]:
    """Like :func:`run`, but errors become reports with a machine-readable code."""
    try:
        return run(job), EXIT_OK
    except HicftError as e:
        report = {
            "schema": SCHEMA,
            "command": job.get("command"),
            "input": job,
            "error": {"code": e.code, "message": str(e), "details": _jsonable(e.details)},
        }
        return report, exit_code(e)


def _jsonable(x):
    return json.loads(json.dumps(x, default=str))


def canonical(report: dict, drop_timing: bool = True) -> str:
    body = {k: v for k, v in report.items() if not (drop_timing and k == "timing")}
    return json.dumps(body, sort_keys=True, indent=2, default=str) + "\n"


def render_markdown(report: dict) -> str:
    lines = [f"# {report.get('command')}", ""]
    lines.append("## Input")
    for k, v in sorted(report.get("input", {}).items()):
        lines.append(f"- **{k}**: `{json.dumps(v, sort_keys=True)}`")
    lines.append("")
    if "error" in report:
        e = report["error"]
        lines += ["## Error", f"`{e['code']}`: {e['message']}"]
        return "\n".join(lines) + "\n"
    lines.append("## Result")
    for k, v in sorted(report["result"].items()):
        if k == "statement":
            lines += ["", "```", v, "```"]
        else:
            lines.append(f"- **{k}**: `{json.dumps(v, sort_keys=True)}`")
    lines += ["", "## Concepts", *[f"- {a}" for a in report.get("anchors", [])]]
    t = report.get("timing")
    if t:
        lines += ["", f"_wall time {t['wall_seconds']:.3f} s_"]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# golden tables


def record_golden(path: Path, job: dict) -> dict:
    report = run(job)
    body = json.loads(canonical(report))
    Path(path).write_text(json.dumps({"job": job, "report": body}, sort_keys=True, indent=2) + "\n")
    return body


def _diff_keys(a, b, prefix="") -> list[str]:
    if isinstance(a, dict) and isinstance(b, dict):
        out = []
        for k in sorted(set(a) | set(b), key=str):
            out += _diff_keys(a.get(k), b.get(k), f"{prefix}.{k}" if prefix else str(k))
        return out
    return [] if a == b else [prefix or "<root>"]


def _replay(path: str) -> tuple[str, list[str]]:
    data = json.loads(Path(path).read_text())
    report, _ = execute(data["job"])
    fresh = json.loads(canonical(report))
    return path, _diff_keys(data["report"], fresh)


def regression_suite(path, update: bool = False, workers: int = 1) -> dict:
    """Replay every stored job under ``path`` and compare reports (timing excluded)."""
    root = Path(path)
    if not root.is_dir():
        raise InvalidJob(f"golden directory {root} does not exist")
    files = sorted(str(p) for p in root.glob("*.json"))
    if update:
        for f in files:
            record_golden(Path(f), json.loads(Path(f).read_text())["job"])
        return {"entries": len(files), "updated": len(files), "mismatches": {}}
    if workers > 1 and len(files) > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_replay, files))
    else:
        results = [_replay(f) for f in files]
    mism = {Path(f).name: keys for f, keys in results if keys}
    summary = {"entries": len(files), "mismatches": mism}
    if mism:
        raise GoldenMismatch(
            "golden reports differ: " + ", ".join(f"{k} ({', '.join(v)})" for k, v in mism.items()),
            **summary,
        )
    return summary


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["json", "md", "markdown"], default="json")
    common.add_argument("--seed", type=int)

    p = argparse.ArgumentParser(prog="hicft", description=__doc__.splitlines()[0])
    p.add_argument("--jobs", help="JSON file with a list of jobs to run in batch")
    p.add_argument("--output", choices=["json", "md", "markdown"], default="json")
    sub = p.add_subparsers(dest="command")

    k = sub.add_parser("kgroup", parents=[common], help="K^M_r(K)/n")
    k.add_argument("--field", choices=["fq", "laurent", "2local"], default="fq")
    k.add_argument("--q", type=int, required=True)
    k.add_argument("--r", type=int, required=True)
    k.add_argument("--n", type=int, required=True)
    k.add_argument("--precision", type=int, default=16)

    c = sub.add_parser("classgroup", parents=[common], help="idele class group mod n")
    c.add_argument("--scheme", choices=["p1", "local_surface"], default="p1")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--divisor", default="")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--degree-bound", type=int, default=ideles.DEFAULT_BOUND)
    c.add_argument("--precision", type=int, default=ideles.DEFAULT_PRECISION)

    o = sub.add_parser("oracle", parents=[common], help="independent oracles")
    o.add_argument("oracle", choices=["ray-class"])
    o.add_argument("--q", type=int, required=True)
    o.add_argument("--divisor", default="")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--degree-bound", type=int)

    v = sub.add_parser("verify", parents=[common], help="property suites")
    v.add_argument("suite", choices=["weil", "local-surface", "steinberg", "tame"])
    v.add_argument("--q", type=int, required=True)
    v.add_argument("--trials", type=int)
    v.add_argument("--max-degree", type=int, default=4)
    v.add_argument("--field", choices=["laurent", "2local"], default="laurent")
    v.add_argument("--precision", type=int, default=16)
    v.add_argument("--n", type=int)

    h = sub.add_parser("kato-homology", parents=[common], help="homology of the nerve complex")
    h.add_argument("--config", required=True)
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--degrees", type=_int_list)

    r = sub.add_parser("report", parents=[common], help="(H_1, H_2) obstruction report")
    r.add_argument("--config", required=True)
    r.add_argument("--n", type=int, required=True)

    g = sub.add_parser("regress", help="replay the golden tables")
    g.add_argument("--golden", default="tests/golden")
    g.add_argument("--update", action="store_true")
    g.add_argument("--workers", type=int, default=1)
    return p


def job_from_args(a: argparse.Namespace) -> dict:
    cmd = a.command
    job: dict = {"command": cmd}
    if cmd == "kgroup":
        job.update(field=a.field, q=a.q, r=a.r, n=a.n, precision=a.precision)
    elif cmd == "classgroup":
        job.update(
            scheme=a.scheme, q=a.q, divisor=a.divisor, n=a.n,
            degree_bound=a.degree_bound, precision=a.precision,
        )
    elif cmd == "oracle":
        job.update(oracle=a.oracle, q=a.q, divisor=a.divisor, n=a.n, degree_bound=a.degree_bound)
    elif cmd == "verify":
        job.update(suite=a.suite, q=a.q)
        if a.suite in ("weil", "local-surface", "tame"):
            job["seed"] = a.seed
            if a.trials is not None:
                job["trials"] = a.trials
        if a.suite == "weil":
            job["max_degree"] = a.max_degree
        if a.suite == "tame":
            job.update(field=a.field, precision=a.precision)
        if a.suite == "steinberg" and a.n is not None:
            job["n"] = a.n
    elif cmd in ("kato-homology", "report"):
        job.update(config=a.config, n=a.n)
        if cmd == "kato-homology" and a.degrees is not None:
            job["degrees"] = a.degrees
    return job


def _emit(report, fmt: str):
    if fmt in ("md", "markdown"):
        if isinstance(report, list):
            sys.stdout.write("\n".join(render_markdown(r) for r in report))
        else:
            sys.stdout.write(render_markdown(report))
    else:
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2, default=str) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    if a.jobs:
        jobs = json.loads(Path(a.jobs).read_text())
        reports, codes = zip(*(execute(j) for j in jobs)) if jobs else ((), ())
        _emit(list(reports), a.output)
        return max(codes, default=EXIT_OK)
    if a.command is None:
        parser.print_help()
        return EXIT_ERROR
    if a.command == "regress":
        try:
            summary = regression_suite(a.golden, a.update, a.workers)
        except HicftError as e:
            _emit({"schema": SCHEMA, "error": {"code": e.code, "message": str(e),
                                               "details": _jsonable(e.details)}}, "json")
            return exit_code(e)
        _emit({"schema": SCHEMA, "command": "regress", "result": summary}, "json")
        return EXIT_OK
    report, code = execute(job_from_args(a))
    _emit(report, a.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
