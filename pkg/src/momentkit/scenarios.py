"""Named verification scenarios behind the command-line front end.

Each scenario kind owns a parameter schema (validated by hand, unknown
fields rejected) and a runner returning (passed, results, tables).  Results
are JSON-ready and deterministic for a fixed config including the seed;
anything time-dependent belongs in the separate metadata file written by
the CLI.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass

import numpy as np

from .concentration import (
    MeasureFamily,
    concentration_check,
    concentration_equivalence_check,
    verify_main_theorem_scenario,
)
from .errors import ConfigError, IncompleteSystem
from .forms import (
    DualFunctional,
    GramForm,
    OrthonormalSystem,
    is_infinite,
    whitening_system,
)
from .gaussian import (
    GaussianMeasure,
    McConfig,
    chebyshev_outside_ball,
    fundamental_lemma_check,
    second_moment_check,
    tail_lower_bound_check,
)
from .moments import (
    DiscreteMeasure,
    QuadraticModuleSpec,
    carleman_from_log_moments,
    log_even_moments_from_measure,
    log_gaussian_even_moments,
    log_squared_exponential_moments,
)
from .symalg import AlgebraElement, GradedSeminormTower, tilde_trace_identity
from .traces import TraceMethod, trace


# ---------------------------------------------------------------------------
# The q-construction from a weight sequence
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Positive weights lambda_1..lambda_N; the truncated sum of squares is
    recorded as the expected trace."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals or any(v <= 0 for v in vals):
            raise ConfigError("weights must be a nonempty positive sequence")
        object.__setattr__(self, "values", vals)

    @property
    def sum_squares(self) -> float:
        return float(sum(v * v for v in self.values))


@dataclass(frozen=True, eq=False)
class ConstructQRecord:
    q: GramForm
    trace: float
    expected_trace: float
    gram_error: float
    ok: bool

    def to_jsonable(self) -> dict:
        return {
            "q": self.q.to_jsonable(),
            "trace": float(self.trace),
            "expected_trace": float(self.expected_trace),
            "gram_error": float(self.gram_error),
            "ok": bool(self.ok),
        }


def construct_q(
    p: GramForm, e_sys: OrthonormalSystem, lam: WeightSequence, tol: float = 1e-10
) -> ConstructQRecord:
    """q(v)^2 = sum_n lambda_n^{-2} <v, e_n>_p^2 over a complete
    p-orthonormal system; then tr(p/q) = sum_n lambda_n^2 and the rescaled
    family {lambda_n e_n} is a complete q-orthonormal system."""
    if len(e_sys) != p.rank or len(e_sys) != len(lam.values):
        raise IncompleteSystem(
            f"need |E| = rank p = |lambda|, got {len(e_sys)}, {p.rank}, "
            f"{len(lam.values)}"
        )
    g = np.zeros((p.dim, p.dim))
    for lam_n, e_n in zip(lam.values, e_sys.vectors):
        u = p.gram @ e_n
        g += np.outer(u, u) / lam_n**2
    q = GramForm(dim=p.dim, gram=g, psd_tol=p.psd_tol)
    tr = trace(p, q).value
    expected = lam.sum_squares
    scaled = tuple(
        lam_n * e_n for lam_n, e_n in zip(lam.values, e_sys.vectors)
    )
    sys_q = OrthonormalSystem(form=q, vectors=scaled, complete=True)
    gram_err = sys_q.gram_error()
    ok = (
        not is_infinite(tr)
        and abs(tr - expected) <= tol * max(1.0, abs(expected))
        and gram_err < tol
    )
    return ConstructQRecord(
        q=q,
        trace=float(tr) if not is_infinite(tr) else float("nan"),
        expected_trace=expected,
        gram_error=float(gram_err),
        ok=bool(ok),
    )


# ---------------------------------------------------------------------------
# Config parsing helpers
# ---------------------------------------------------------------------------


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _check_matrix(x, where, errors):
    if (
        not isinstance(x, list)
        or not x
        or any(not isinstance(r, list) or len(r) != len(x) for r in x)
        or any(not _is_number(v) for r in x for v in r)
    ):
        errors.append(f"{where}: expected a square matrix of numbers")


def _check_vector(x, where, errors):
    if not isinstance(x, list) or not x or any(not _is_number(v) for v in x):
        errors.append(f"{where}: expected a nonempty list of numbers")


def _check_measure(x, where, errors):
    if not isinstance(x, dict) or set(x) != {"atoms", "weights"}:
        errors.append(f"{where}: expected an object with keys atoms, weights")
        return
    if not isinstance(x["atoms"], list) or not x["atoms"]:
        errors.append(f"{where}.atoms: expected a nonempty list of points")
    _check_vector(x.get("weights"), f"{where}.weights", errors)


def _check_element(x, where, errors):
    if not isinstance(x, dict) or not {"dim", "terms"} <= set(x):
        errors.append(f"{where}: expected an object with keys dim, terms")
        return
    for i, t in enumerate(x["terms"]):
        if not isinstance(t, dict) or set(t) != {"alpha", "c"}:
            errors.append(f"{where}.terms[{i}]: expected keys alpha, c")


_CHECKERS = {
    "matrix": _check_matrix,
    "vector": _check_vector,
    "measure": _check_measure,
    "element": _check_element,
    "number": lambda x, w, e: None if _is_number(x) else e.append(f"{w}: expected a number"),
    "positive_number": lambda x, w, e: None
    if _is_number(x) and x > 0
    else e.append(f"{w}: expected a positive number"),
    "positive_integer": lambda x, w, e: None
    if isinstance(x, int) and not isinstance(x, bool) and x > 0
    else e.append(f"{w}: expected a positive integer"),
    "string": lambda x, w, e: None
    if isinstance(x, str)
    else e.append(f"{w}: expected a string"),
    "pair_list": lambda x, w, e: None
    if isinstance(x, list)
    and all(isinstance(p, list) and len(p) == 2 and all(map(_is_number, p)) for p in x)
    else e.append(f"{w}: expected a list of [number, number] pairs"),
    "vector_list": lambda x, w, e: [_check_vector(v, f"{w}[{i}]", e) for i, v in enumerate(x)]
    if isinstance(x, list) and x
    else e.append(f"{w}: expected a nonempty list of vectors"),
    "element_list": lambda x, w, e: [_check_element(el, f"{w}[{i}]", e) for i, el in enumerate(x)]
    if isinstance(x, list)
    else e.append(f"{w}: expected a list"),
    "pair_forms_list": lambda x, w, e: [
        _check_matrix(p.get("p"), f"{w}[{i}].p", e) or _check_matrix(p.get("q"), f"{w}[{i}].q", e)
        if isinstance(p, dict) and set(p) == {"p", "q"}
        else e.append(f"{w}[{i}]: expected an object with keys p, q")
        for i, p in enumerate(x)
    ]
    if isinstance(x, list) and x
    else e.append(f"{w}: expected a nonempty list"),
}


def _parse_form(rows) -> GramForm:
    rows = np.asarray(rows, dtype=float)
    return GramForm(dim=rows.shape[0], gram=rows)


def _parse_measure(data) -> DiscreteMeasure:
    return DiscreteMeasure.from_jsonable(data)


def _parse_element(data, max_degree) -> AlgebraElement:
    terms = {tuple(t["alpha"]): t["c"] for t in data["terms"]}
    return AlgebraElement(data["dim"], max_degree, terms)


# ---------------------------------------------------------------------------
# Scenario runners — each returns (passed, results, tables)
# ---------------------------------------------------------------------------


def _run_trace(params, seed):
    p = _parse_form(params["p"])
    q = _parse_form(params["q"])
    rep_sum = trace(p, q, method=TraceMethod.ORTHONORMAL_SUM)
    rep_op = trace(p, q, method=TraceMethod.OPERATOR_TRACE)
    if is_infinite(rep_sum.value):
        agree = is_infinite(rep_op.value)
        value_json = "infinite"
    else:
        agree = (
            not is_infinite(rep_op.value)
            and abs(rep_sum.value - rep_op.value)
            <= 1e-9 * max(1.0, abs(rep_sum.value))
        )
        value_json = float(rep_sum.value)
    passed = agree
    expected = params.get("expected")
    if expected is not None:
        if expected == "infinite":
            passed = passed and is_infinite(rep_sum.value)
        else:
            passed = passed and not is_infinite(rep_sum.value) and abs(
                rep_sum.value - expected
            ) <= 1e-9 * max(1.0, abs(expected))
    results = {
        "value": value_json,
        "methods_agree": bool(agree),
        "orthonormal_sum": rep_sum.to_jsonable(),
        "operator_trace": rep_op.to_jsonable(),
    }
    return passed, results, {}


def _run_gaussian(params, seed):
    q = _parse_form(params["q"])
    cfg = McConfig(
        seed=seed, samples=params["samples"], streams=params.get("streams", 1)
    )
    gamma = GaussianMeasure.from_form(q)
    if "w" in params:
        w = np.asarray(params["w"], dtype=float)
    else:
        w = gamma.whitening[:, 0]
    results = {}
    second = second_moment_check(gamma, w, cfg)
    results["second_moment"] = second.to_jsonable()
    passed = second.certified
    if "functional" in params:
        l = DualFunctional(dim=q.dim, coeffs=np.asarray(params["functional"]))
        tail = tail_lower_bound_check(gamma, l)
        results["tail_lower_bound"] = tail.to_jsonable()
        passed = passed and tail.ok
    if "p" in params and "delta" in params:
        cheb = chebyshev_outside_ball(
            gamma, _parse_form(params["p"]), params["delta"], cfg
        )
        results["chebyshev_outside_ball"] = cheb.to_jsonable()
        passed = passed and cheb.certified
    return passed, results, {}


def _run_fundamental_lemma(params, seed):
    rep = fundamental_lemma_check(
        _parse_measure(params["mu"]),
        _parse_form(params["p"]),
        _parse_form(params["q"]),
        params["epsilon"],
        params["delta"],
    )
    passed = rep.hypothesis_certified and rep.conclusion_ok is True
    return passed, rep.to_jsonable(), {}


def _run_concentration(params, seed):
    fam = MeasureFamily.from_global(_parse_measure(params["global_measure"]))
    p = _parse_form(params["p"])
    rep = concentration_check(
        fam,
        p,
        params["epsilon"],
        params["delta"],
        probe_budget=params.get("probe_budget", 16),
        rng=np.random.default_rng(seed),
    )
    passed = rep.certified
    results = {"concentration": rep.to_jsonable()}
    if "equivalence_grid" in params:
        ok = concentration_equivalence_check(
            fam,
            p,
            [tuple(g) for g in params["equivalence_grid"]],
            rng=np.random.default_rng(seed + 1),
        )
        results["equivalence"] = bool(ok)
        passed = passed and ok
    return passed, results, {}


def _run_main_theorem(params, seed):
    mu = _parse_measure(params["measure"])
    degrees = params["degrees"]
    gens = tuple(
        _parse_element(g, degrees) for g in params.get("generators", [])
    )
    report = verify_main_theorem_scenario(
        mu,
        _parse_form(params["q"]),
        QuadraticModuleSpec(generators=gens),
        degrees,
        params["eps_grid"],
    )
    tables = {
        "stages": {
            "header": ["name", "status"],
            "rows": [[s.name, s.status] for s in report.stages],
        }
    }
    return report.overall_pass, report.to_jsonable(), tables


def _run_carleman(params, seed):
    n_max = params["n_max"]
    margin = params.get("margin", 0.1)
    family = params.get("family")
    if family is not None:
        if family == "gaussian":
            logs = log_gaussian_even_moments(n_max)
        elif family == "squared_exponential":
            logs = log_squared_exponential_moments(n_max)
        else:
            raise ConfigError(
                f"unknown carleman family {family!r}: expected gaussian or "
                "squared_exponential"
            )
    else:
        if "measure" not in params or "direction" not in params:
            raise ConfigError("carleman needs either family or measure+direction")
        logs = log_even_moments_from_measure(
            _parse_measure(params["measure"]),
            np.asarray(params["direction"], dtype=float),
            n_max,
        )
    diag = carleman_from_log_moments(logs, margin=margin)
    passed = True
    if "expected_verdict" in params:
        passed = passed and diag.verdict.value == params["expected_verdict"]
    if "expected_tail_sum" in params:
        tol = params.get("tail_tol", 1e-9)
        tail = diag.tail_sum_estimate
        passed = passed and isinstance(tail, float) and abs(
            tail - params["expected_tail_sum"]
        ) <= tol
    tables = {
        "terms": {
            "header": ["n", "t_n", "partial_sum"],
            "rows": [
                [n + 1, float(t), float(s)]
                for n, (t, s) in enumerate(zip(diag.terms, diag.partial_sums))
            ],
        }
    }
    return passed, diag.to_jsonable(), tables


def _run_tilde_trace(params, seed):
    pairs = tuple(
        (_parse_form(e["p"]), _parse_form(e["q"])) for e in params["pairs"]
    )
    tower = GradedSeminormTower(
        dim=params["dim"],
        max_degree=params["max_degree"],
        base_forms=pairs,
        lam=tuple(params["lam"]),
        eta=tuple(params["eta"]),
        constants=tuple(params["constants"]),
    )
    rep = tilde_trace_identity(tower, rel_tol=params.get("rel_tol", 1e-8))
    return rep.agree, rep.to_jsonable(), {}


def _run_construct_q(params, seed):
    p = _parse_form(params["p"])
    if "vectors" in params:
        vecs = tuple(np.asarray(v, dtype=float) for v in params["vectors"])
        e_sys = OrthonormalSystem(form=p, vectors=vecs, complete=True)
    else:
        e_sys = whitening_system(p)
    record = construct_q(p, e_sys, WeightSequence(values=tuple(params["lam"])))
    return record.ok, record.to_jsonable(), {}


SCENARIO_KINDS = {
    "trace": {
        "description": "two-method relative trace of a seminorm pair",
        "runner": _run_trace,
        "required": {"p": "matrix", "q": "matrix"},
        "optional": {"expected": "number_or_infinite"},
    },
    "gaussian": {
        "description": "Gaussian measure checks: second moment, tail bound, "
        "Chebyshev mass outside a ball",
        "runner": _run_gaussian,
        "required": {"q": "matrix", "samples": "positive_integer"},
        "optional": {
            "streams": "positive_integer",
            "w": "vector",
            "functional": "vector",
            "p": "matrix",
            "delta": "positive_number",
        },
    },
    "fundamental_lemma": {
        "description": "quantitative dual-ball mass bound for a discrete "
        "measure on functionals",
        "runner": _run_fundamental_lemma,
        "required": {
            "mu": "measure",
            "p": "matrix",
            "q": "matrix",
            "epsilon": "positive_number",
            "delta": "positive_number",
        },
        "optional": {},
    },
    "concentration": {
        "description": "Chebyshev concentration certificate for the marginal "
        "family of a global measure",
        "runner": _run_concentration,
        "required": {
            "global_measure": "measure",
            "p": "matrix",
            "epsilon": "positive_number",
            "delta": "positive_number",
        },
        "optional": {
            "probe_budget": "positive_integer",
            "equivalence_grid": "pair_list",
        },
    },
    "main_theorem": {
        "description": "nine-stage end-to-end verification for a target "
        "measure",
        "runner": _run_main_theorem,
        "required": {
            "measure": "measure",
            "q": "matrix",
            "degrees": "positive_integer",
            "eps_grid": "vector",
        },
        "optional": {"generators": "element_list"},
    },
    "carleman": {
        "description": "log-space moment-growth diagnostic with three-way "
        "verdict",
        "runner": _run_carleman,
        "required": {"n_max": "positive_integer"},
        "optional": {
            "family": "string",
            "measure": "measure",
            "direction": "vector",
            "margin": "positive_number",
            "expected_verdict": "string",
            "expected_tail_sum": "number",
            "tail_tol": "positive_number",
        },
    },
    "tilde_trace": {
        "description": "two-path trace identity for weighted graded seminorm "
        "towers",
        "runner": _run_tilde_trace,
        "required": {
            "dim": "positive_integer",
            "max_degree": "positive_integer",
            "pairs": "pair_forms_list",
            "lam": "vector",
            "eta": "vector",
            "constants": "vector",
        },
        "optional": {"rel_tol": "positive_number"},
    },
    "construct_q": {
        "description": "build q from a p-orthonormal system and weights; "
        "verify the trace identity",
        "runner": _run_construct_q,
        "required": {"p": "matrix", "lam": "vector"},
        "optional": {"vectors": "vector_list"},
    },
}


def validate_config(config) -> list[str]:
    """Returns a list of problems; empty means the config is runnable."""
    errors: list[str] = []
    if not isinstance(config, dict):
        return ["config must be a JSON object"]
    allowed_top = {"kind", "parameters", "seed", "output_path"}
    unknown = set(config) - allowed_top
    if unknown:
        errors.append(f"unknown top-level fields: {sorted(unknown)}")
    kind = config.get("kind")
    if not isinstance(kind, str):
        errors.append("missing or non-string 'kind'")
        return errors
    if kind not in SCENARIO_KINDS:
        close = difflib.get_close_matches(kind, SCENARIO_KINDS, n=1)
        hint = f"; did you mean {close[0]!r}?" if close else ""
        errors.append(f"unknown kind {kind!r}{hint}")
        return errors
    if "seed" in config and not isinstance(config["seed"], int):
        errors.append("'seed' must be an integer")
    if "output_path" in config and not isinstance(config["output_path"], str):
        errors.append("'output_path' must be a string")
    params = config.get("parameters")
    if not isinstance(params, dict):
        errors.append("missing or non-object 'parameters'")
        return errors
    spec = SCENARIO_KINDS[kind]
    known = set(spec["required"]) | set(spec["optional"])
    unknown = set(params) - known
    if unknown:
        errors.append(f"parameters: unknown fields {sorted(unknown)}")
    for name, typ in spec["required"].items():
        if name not in params:
            errors.append(f"parameters.{name}: required")
        else:
            _check_param(params[name], typ, f"parameters.{name}", errors)
    for name, typ in spec["optional"].items():
        if name in params:
            _check_param(params[name], typ, f"parameters.{name}", errors)
    return errors


def _check_param(value, typ, where, errors):
    if typ == "number_or_infinite":
        if value != "infinite" and not _is_number(value):
            errors.append(f"{where}: expected a number or \"infinite\"")
        return
    checker = _CHECKERS.get(typ)
    if checker is not None:
        checker(value, where, errors)


def run_config(config, seed_override=None):
    """Execute a validated config; returns (passed, results, tables, seed)."""
    seed = seed_override if seed_override is not None else config.get("seed", 0)
    runner = SCENARIO_KINDS[config["kind"]]["runner"]
    passed, results, tables = runner(config["parameters"], seed)
    return bool(passed), results, tables, seed
