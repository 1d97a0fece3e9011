"""Problem files, the analysis pipeline and the report it produces."""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .coefficients import MAX_SERIES_DEGREE, DeepestCoefficients, deepest_coefficients
from .errors import ConsistencyError, InputError, QuadratureError, ResourceLimitError
from .exact import format_rational, parse_rational
from .fan import ChartData, Fan, chart_data, normal_fan, smooth_subdivision
from .lattice import SparsePolynomial
from .newton import ConvenienceCheck, NewtonPolyhedron, is_convenient, newton_polyhedron
from .nondegeneracy import DEGENERATE, PROBABLY, NondegeneracyVerdict, check_nondegenerate
from .oracle.fitting import laurent_contour, laurent_fit, oscillatory_fit
from .oracle.plateau import PlateauTestFunction
from .oracle.quadrature import continuation_unavailable
from .poles import (
    CandidatePole,
    VanishingCertificate,
    _in_ladder,
    candidate_poles,
    candidate_values,
    default_depth,
    delta_lattice_points,
    is_fake,
    pole_to_json,
    ray_table,
    vanishing_certificates,
)

SCHEMA_VERSION = "1.0"
MAX_VARIABLES = 4

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_VERIFICATION = 3

# verification tolerances
LAURENT_ABS_TOL = 1e-4
LAURENT_REL_TOL = 5e-3
VANISHING_RATIO = 1e-3
OSCILLATORY_REL_TOL = 0.05
DEFAULT_T_GRID = (40.0, 60.0, 90.0, 135.0, 200.0, 300.0, 400.0)


@dataclass(frozen=True)
class Options:
    seed: int = 0
    tolerance: float = 1e-8
    verify: bool = False
    t_grid: tuple[float, ...] | None = None
    max_series_degree: int = MAX_SERIES_DEGREE
    trials: int = 64


@dataclass(frozen=True)
class ProblemSpec:
    variables: tuple[str, ...]
    f: SparsePolynomial
    phi: PlateauTestFunction
    depth: Fraction | None = None
    options: Options = field(default_factory=Options)

    @property
    def n(self) -> int:
        return len(self.variables)

    @classmethod
    def from_text(cls, text: str) -> "ProblemSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data) -> "ProblemSpec":
        if not isinstance(data, dict):
            raise InputError("problem file must hold a JSON object")
        variables = data.get("variables")
        if not isinstance(variables, list) or not variables or not all(isinstance(v, str) for v in variables):
            raise InputError("'variables' must be a non-empty list of names")
        if len(set(variables)) != len(variables):
            raise InputError("'variables' contains duplicates")
        n = len(variables)
        if n > MAX_VARIABLES:
            raise InputError(f"at most {MAX_VARIABLES} variables are supported, got {n}")
        f = _terms(data.get("f"), n, "f")
        if f.is_zero():
            raise InputError("'f' is the zero polynomial")
        phi_data = data.get("phi", {})
        if not isinstance(phi_data, dict):
            raise InputError("'phi' must be an object")
        jet = _terms(phi_data.get("jet", [{"exps": [0] * n, "coef": "1"}]), n, "phi.jet")
        r_inner = _rational(phi_data.get("r_inner", "1/2"), "phi.r_inner")
        r_outer = _rational(phi_data.get("r_outer", "1"), "phi.r_outer")
        if not 0 < r_inner < r_outer:
            raise InputError("need 0 < phi.r_inner < phi.r_outer")
        depth = data.get("depth")
        if depth is not None:
            depth = _rational(depth, "depth")
            if depth <= 0:
                raise InputError("'depth' must be positive")
        return cls(tuple(variables), f, PlateauTestFunction(jet, r_inner, r_outer), depth, _options(data.get("options", {})))

    def to_json(self) -> dict:
        opts = self.options
        return {
            "variables": list(self.variables),
            "f": self.f.to_json(),
            "phi": {
                "jet": self.phi.jet.to_json(),
                "r_inner": format_rational(self.phi.r_inner),
                "r_outer": format_rational(self.phi.r_outer),
            },
            "depth": None if self.depth is None else format_rational(self.depth),
            "options": {
                "seed": opts.seed,
                "tolerance": opts.tolerance,
                "verify": opts.verify,
                "t_grid": None if opts.t_grid is None else list(opts.t_grid),
                "max_series_degree": opts.max_series_degree,
                "trials": opts.trials,
            },
        }

    def content_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.to_json()).encode()).hexdigest()


def _rational(value, where: str) -> Fraction:
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc


def _terms(raw, n: int, where: str) -> SparsePolynomial:
    if not isinstance(raw, list):
        raise InputError(f"'{where}' must be a list of terms")
    terms = []
    for i, t in enumerate(raw):
        if not isinstance(t, dict) or "exps" not in t or "coef" not in t:
            raise InputError(f"{where}[{i}] needs 'exps' and 'coef'")
        exps = t["exps"]
        if not isinstance(exps, list) or len(exps) != n or not all(isinstance(e, int) and e >= 0 for e in exps):
            raise InputError(f"{where}[{i}].exps must be {n} non-negative integers")
        terms.append((tuple(exps), _rational(t["coef"], f"{where}[{i}].coef")))
    return SparsePolynomial(n, terms)


def _options(raw) -> Options:
    if not isinstance(raw, dict):
        raise InputError("'options' must be an object")
    unknown = set(raw) - {"seed", "tolerance", "verify", "t_grid", "max_series_degree", "trials"}
    if unknown:
        raise InputError(f"unknown options: {sorted(unknown)}")
    d = Options()
    t_grid = raw.get("t_grid")
    if t_grid is not None:
        if not isinstance(t_grid, list) or len(t_grid) < 3:
            raise InputError("options.t_grid must list at least 3 values")
        t_grid = tuple(float(t) for t in t_grid)
    opts = Options(
        seed=int(raw.get("seed", d.seed)),
        tolerance=float(raw.get("tolerance", d.tolerance)),
        verify=bool(raw.get("verify", d.verify)),
        t_grid=t_grid,
        max_series_degree=int(raw.get("max_series_degree", d.max_series_degree)),
        trials=int(raw.get("trials", d.trials)),
    )
    if opts.tolerance <= 0 or opts.max_series_degree < 0 or opts.trials < 1:
        raise InputError("options out of range")
    return opts


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def render_json(report: dict) -> str:
    # floats go through repr, which is the shortest string that round-trips
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------- pipeline


class PreconditionFailure(Exception):
    """A hypothesis of the theory fails for this input; downstream results would be meaningless."""

    def __init__(self, hypothesis: str, detail: str, evidence: dict | None = None):
        super().__init__(f"{hypothesis}: {detail}")
        self.hypothesis = hypothesis
        self.detail = detail
        self.evidence = evidence or {}


@dataclass
class Analysis:
    spec: ProblemSpec
    convenience: ConvenienceCheck
    newton: NewtonPolyhedron
    normal: Fan
    fan: Fan
    nondegeneracy: NondegeneracyVerdict
    depth: Fraction
    charts: list[ChartData] = field(default_factory=list)
    poles: list[CandidatePole] = field(default_factory=list)
    certificates: dict[int, list[VanishingCertificate]] = field(default_factory=dict)
    deepest: dict[int, DeepestCoefficients] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def pole(self, j: int) -> CandidatePole:
        for p in self.poles:
            if p.index == j:
                return p
        raise InputError(f"no candidate pole with index {j} up to depth {format_rational(self.depth)}")


STAGES = ("poles", "coefficients")


def analyze(spec: ProblemSpec, depth=None, stage: str = "coefficients") -> Analysis:
    """Newton polyhedron, fans, non-degeneracy, candidate poles and (optionally) exact coefficients."""
    if stage not in STAGES:
        raise InputError(f"stage must be one of {STAGES}")
    f = spec.f
    conv = is_convenient(f)
    if not conv:
        raise PreconditionFailure(
            "convenience",
            "f has no pure power in the variables " + ", ".join(spec.variables[i] for i in conv.failing_axes),
            {"failing_axes": list(conv.failing_axes)},
        )
    if f.constant_term() != 0:
        raise PreconditionFailure("singular point", "f(0) must vanish", {"f0": format_rational(f.constant_term())})
    N = newton_polyhedron(f)
    sigma0 = normal_fan(N)
    sigma = smooth_subdivision(sigma0)
    verdict = check_nondegenerate(f, N, trials=spec.options.trials, seed=spec.options.seed)
    if verdict.status == DEGENERATE:
        bad = next(fv for fv in verdict.faces if fv.status == DEGENERATE)
        raise PreconditionFailure(
            "non-degeneracy",
            "some face polynomial f_gamma has a critical zero on the real torus",
            {"face": [list(v) for v in bad.vertices], "witness": list(bad.witness)},
        )
    depth = Fraction(depth) if depth is not None else spec.depth
    if depth is None:
        depth = default_depth(sigma, N)
    if depth <= 0:
        raise InputError("depth must be positive")
    out = Analysis(spec, conv, N, sigma0, sigma, verdict, depth)
    out.warnings.append(
        "k_j and Sigma_j^(k) are computed on the reported smooth subdivision; they bound the pole orders from above"
    )
    if verdict.status == PROBABLY:
        out.warnings.append(
            f"non-degeneracy of faces of dimension >= 2 is numerical ({verdict.trials} seeded local searches)"
        )
    out.poles = candidate_poles(sigma, N, depth)
    jet_support = spec.phi.taylor_support
    out.certificates = {p.index: vanishing_certificates(p, jet_support) for p in out.poles}
    if stage == "poles":
        return out
    out.charts = [chart_data(c, f, N) for c in sigma.cones]
    for p in out.poles:
        deep = deepest_coefficients(p, out.charts, spec.phi.jet, spec.options.max_series_degree)
        out.deepest[p.index] = deep
        for note in deep.caveats:
            out.warnings.append(f"pole {p.index} (lambda = {format_rational(p.lam)}): {note}")
    return out


# ---------------------------------------------------------------- numeric verification


def thread_count() -> int:
    raw = os.environ.get("ZETASCOPE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"ZETASCOPE_THREADS must be an integer, got {raw!r}") from None


@contextmanager
def ordered_mapper(threads: int | None = None):
    """A map() replacement that may run in threads but returns results in input order."""
    threads = thread_count() if threads is None else threads
    if threads <= 1:
        yield map
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield pool.map


def _check(name: str, predicted: float, fitted: float, passed: bool, **extra) -> dict:
    abs_err = abs(fitted - predicted)
    rel_err = abs_err / abs(predicted) if predicted != 0 else None
    out = {"name": name, "predicted": predicted, "fitted": fitted, "abs_err": abs_err, "rel_err": rel_err, "pass": passed}
    out.update(extra)
    return out


CONTOUR_RADIUS_MAX = 0.25
CONTOUR_POINTS = 64


def _fit_method(analysis: Analysis, pole: CandidatePole) -> tuple[str | None, str | None]:
    """('direct' | 'contour' | None, reason when None)."""
    if pole.index == 1:
        return "direct", None
    reason = continuation_unavailable(analysis.spec.f, analysis.spec.phi)
    return (None, reason) if reason else ("contour", None)


def contour_radius(analysis: Analysis, pole: CandidatePole) -> float:
    """Half the distance from lambda_j to the nearest other element of P."""
    others = [v for v in candidate_values(analysis.fan, analysis.newton, analysis.depth + 1) if v != pole.lam]
    gap = min(abs(v - pole.lam) for v in others)
    return min(CONTOUR_RADIUS_MAX, float(gap) / 2)


def _laurent(analysis: Analysis, pole: CandidatePole, method: str, mapper: Callable):
    spec = analysis.spec
    k_max = max(pole.kj, 1)
    if method == "direct":
        return laurent_fit(spec.f, spec.phi, pole.lam, k_max, tol=spec.options.tolerance, mapper=mapper)
    radius = contour_radius(analysis, pole)
    return laurent_contour(spec.f, spec.phi, pole.lam, k_max, radius, CONTOUR_POINTS, mapper=mapper)


def _fit_json(fit, method: str) -> dict:
    out = {
        "method": method,
        "coefficients": {str(k): v for k, v in sorted(fit.coefficients.items())},
        "errors": {str(k): v for k, v in sorted(fit.errors.items())},
    }
    if method == "direct":
        out.update(residual=fit.residual, condition=fit.condition, offsets=fit.offsets, warnings=fit.warnings)
    else:
        out.update(radius=fit.radius, points=fit.points)
    return out


def verify(analysis: Analysis, poles: Sequence[int] | None = None, threads: int | None = None) -> dict:
    """Compare exact predictions with oracle values.

    The first pole is fitted from samples of the defining integral on
    -lambda_1 + [0.02, 0.2]. Deeper poles need analytic continuation: for
    quasi-homogeneous f the Euler-field identity gives Z at complex arguments and
    the Laurent coefficients come from a Cauchy integral around -lambda_j.
    Vanishing certificates are checked against the magnitude of the leading
    coefficient fitted at the first pole. Poles with nothing to compare are
    skipped unless requested explicitly.
    """
    if not analysis.poles:
        return {"checks": [], "fits": {}, "skipped": [], "passed": True}
    targets = [analysis.pole(j) for j in poles] if poles is not None else list(analysis.poles)
    checks: list[dict] = []
    fits: dict[str, dict] = {}
    skipped: list[dict] = []
    cache: dict[int, object] = {}

    with ordered_mapper(threads) as mapper:

        def fitted(pole: CandidatePole, method: str):
            if pole.index not in cache:
                cache[pole.index] = _laurent(analysis, pole, method, mapper)
                fits[str(pole.index)] = _fit_json(cache[pole.index], method)
            return cache[pole.index]

        for pole in targets:
            j = pole.index
            certs = [c for c in analysis.certificates.get(j, []) if "a" in c.zero]
            deep = analysis.deepest.get(j)
            predicted_a = deep.a if deep is not None and deep.applicable and deep.a is not None else None
            oscillatory = j == 1 and analysis.spec.n == 1 and deep is not None and deep.applicable
            if not certs and predicted_a is None and not oscillatory:
                skipped.append({"j": j, "reason": "no exact prediction to compare"})
                continue
            method, reason = _fit_method(analysis, pole)
            if method is None:
                skipped.append({"j": j, "reason": reason})
                continue
            try:
                fit = fitted(pole, method)
                if predicted_a is not None:
                    k = analysis.spec.n
                    pred = predicted_a.value
                    got = fit.coefficients[k]
                    ok = abs(got - pred) <= max(LAURENT_ABS_TOL, LAURENT_REL_TOL * abs(pred))
                    checks.append(_check(f"laurent a[{j},{k}]", pred, got, ok, j=j, method=method))
                if certs:
                    scale = abs(fitted(analysis.poles[0], "direct").leading())
                    done = set()
                    for c in certs:
                        for k in range(c.k, pole.kj + 1):
                            if k in done:
                                continue
                            done.add(k)
                            got = fit.coefficients[k]
                            checks.append(
                                _check(
                                    f"vanishing a[{j},{k}] ({c.rule})",
                                    0.0,
                                    got,
                                    abs(got) < VANISHING_RATIO * scale,
                                    j=j,
                                    method=method,
                                    scale=scale,
                                )
                            )
                if oscillatory:
                    checks.append(_oscillatory_check(analysis, pole, deep, mapper))
            except QuadratureError as exc:
                checks.append({"name": f"quadrature for pole {j}", "j": j, "pass": False, "error": str(exc)})
    return {"checks": checks, "fits": fits, "skipped": skipped, "passed": all(c["pass"] for c in checks)}


def _oscillatory_check(analysis: Analysis, pole: CandidatePole, deep: DeepestCoefficients, mapper) -> dict:
    spec = analysis.spec
    grid = spec.options.t_grid or DEFAULT_T_GRID
    fit = oscillatory_fit(spec.f, spec.phi, grid, pole.lam, pole.kj, mapper=mapper)
    pred = deep.c_osc.value
    err = abs(fit.c - pred)
    rel = err / abs(pred) if pred != 0 else None
    ok = err <= OSCILLATORY_REL_TOL * abs(pred) if pred != 0 else err <= LAURENT_ABS_TOL
    return {
        "name": f"oscillatory c[{pole.index},{pole.kj}]",
        "j": pole.index,
        "predicted": [pred.real, pred.imag],
        "fitted": [fit.c.real, fit.c.imag],
        "abs_err": err,
        "rel_err": rel,
        "pass": ok,
        "t_grid": fit.t_grid,
    }


# ---------------------------------------------------------------- report


def _pole_json(analysis: Analysis, pole: CandidatePole) -> dict:
    out = pole_to_json(pole)
    table = ray_table(analysis.fan, analysis.newton)
    out["nu"] = [[list(a), _in_ladder(pole.lam, l, s)] for a, l, s in table if a in pole.contributing_rays]
    out["delta_points"] = {
        str(k): [list(p) for p in delta_lattice_points(pole, k).lattice_points]
        for k in sorted(pole.sigma)
        if pole.sigma[k]
    }
    certs = analysis.certificates.get(pole.index, [])
    out["certificates"] = [c.to_json() for c in certs]
    out["fake"] = is_fake(pole, certs)
    if pole.index in analysis.deepest:
        out["deepest"] = analysis.deepest[pole.index].to_json()
    return out


def build_report(analysis: Analysis, verification: dict | None = None, poles: Sequence[int] | None = None) -> dict:
    spec = analysis.spec
    selected = analysis.poles if poles is None else [analysis.pole(j) for j in poles]
    report = {
        "schema_version": SCHEMA_VERSION,
        "status": "ok",
        "input": spec.to_json(),
        "input_sha256": spec.content_hash(),
        "convenience": {
            "ok": analysis.convenience.ok,
            "pure_powers": [list(w) for w in analysis.convenience.witnesses],
        },
        "newton": analysis.newton.to_json(),
        "fan": {
            "normal": analysis.normal.to_json(),
            "smooth": analysis.fan.to_json(),
            "rays": [
                {"ray": list(a), "l": l, "norm": s, "first": None if l <= 0 else format_rational(Fraction(s, l))}
                for a, l, s in ray_table(analysis.fan, analysis.newton)
            ],
        },
        "nondegeneracy": analysis.nondegeneracy.to_json(),
        "depth": format_rational(analysis.depth),
        "poles": [_pole_json(analysis, p) for p in selected],
        "warnings": list(analysis.warnings),
    }
    if verification is not None:
        report["verification"] = verification
    return report


def failure_report(spec: ProblemSpec, exc: PreconditionFailure) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "status": "precondition_failure",
        "input": spec.to_json(),
        "input_sha256": spec.content_hash(),
        "hypothesis": exc.hypothesis,
        "detail": exc.detail,
        "evidence": exc.evidence,
    }


def run_analyze(
    spec: ProblemSpec,
    depth=None,
    verify_poles: Sequence[int] | None = None,
    do_verify: bool | None = None,
    report_poles: Sequence[int] | None = None,
    stage: str = "coefficients",
) -> tuple[dict, int]:
    """Run the full pipeline; returns (report, exit code)."""
    try:
        analysis = analyze(spec, depth, stage)
    except PreconditionFailure as exc:
        return failure_report(spec, exc), EXIT_PRECONDITION
    except (ConsistencyError, ResourceLimitError) as exc:
        return failure_report(spec, PreconditionFailure("internal consistency", str(exc))), EXIT_PRECONDITION
    do_verify = spec.options.verify if do_verify is None else do_verify
    verification = None
    if do_verify or verify_poles is not None:
        verification = verify(analysis, verify_poles)
    report = build_report(analysis, verification, report_poles)
    code = EXIT_OK
    if verification is not None and not verification["passed"]:
        code = EXIT_VERIFICATION
    return report, code


def render_text(report: dict) -> str:
    lines = [f"zetascope report (schema {report['schema_version']})"]
    inp = report["input"]
    names = inp["variables"]
    f = SparsePolynomial.from_json(len(names), inp["f"])
    lines.append(f"f = {f.to_string(names)}")
    if report["status"] != "ok":
        lines.append(f"PRECONDITION FAILED: {report['hypothesis']}: {report['detail']}")
        for k, v in report["evidence"].items():
            lines.append(f"  {k}: {v}")
        return "\n".join(lines) + "\n"
    lines.append(f"non-degeneracy: {report['nondegeneracy']['status']}")
    lines.append("rays: " + " ".join("(" + ",".join(map(str, r["ray"])) + ")" for r in report["fan"]["rays"]))
    lines.append(f"candidate poles up to lambda = {report['depth']}:")
    lines.append(f"  {'j':>3}  {'lambda':>8}  {'kj':>3}  {'fake':>5}  {'a[j,n]':>14}  certificates")
    for p in report["poles"]:
        deep = p.get("deepest") or {}
        a = deep.get("a") if deep.get("applicable") else None
        a_str = f"{a['float']:.10g}" if a else "-"
        rules = sorted({f"{c['rule']}@k{c['k']}" for c in p["certificates"]})
        lines.append(
            f"  {p['j']:>3}  {p['lambda']:>8}  {p['kj']:>3}  {str(p['fake']):>5}  {a_str:>14}  {' '.join(rules) or '-'}"
        )
    if "verification" in report:
        v = report["verification"]
        lines.append(f"verification: {'PASS' if v['passed'] else 'FAIL'}")
        for c in v["checks"]:
            mark = "ok  " if c["pass"] else "FAIL"
            if "error" in c:
                lines.append(f"  {mark} {c['name']}: {c['error']}")
            else:
                lines.append(f"  {mark} {c['name']}: predicted {c['predicted']}, fitted {c['fitted']}")
        for s in v["skipped"]:
            lines.append(f"  skip pole {s['j']}: {s['reason']}")
    for w in report["warnings"]:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"
