"""End-to-end analysis of a scored query log and report serialization."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .bell import (
    BellResult,
    Form,
    SuiteConfig,
    chsh_composite,
    optimal_chsh_observables,
    run_suite,
)
from .composite import (
    bell_state,
    rotation_basis,
    rotational_invariance_check,
    schmidt_decompose,
    tensor_product,
)
from .hilbert import DEFAULT_DIMENSIONS, InputError, order_effect, validate_dimensions
from .loglab import (
    Case,
    DocumentPair,
    QueryGroup,
    StatedQuery,
    parse_log,
    prepare,
    select_case1,
    select_case2,
    select_case3,
    select_correlated,
)

SIG_DIGITS = 12
ORACLE_ANGLES = tuple(k * math.pi / 8 for k in range(1, 9))
PAIR_FORMS = (Form.CHSH_TRACE, Form.CHSH_PROBABILITY, Form.N_SETTINGS)


@dataclass(frozen=True)
class RunConfig:
    dimensions: tuple[str, ...] = DEFAULT_DIMENSIONS
    standard_dimension: str | None = None
    cases: tuple[Case, ...] = (Case.I, Case.II, Case.III)
    forms: tuple[Form, ...] = PAIR_FORMS
    min_cooccurrence: int = 2
    half_tolerance: float = 0.0
    oracle_mode: bool = False
    output_format: str = "json"

    def __post_init__(self):
        dims = validate_dimensions(self.dimensions)
        object.__setattr__(self, "dimensions", dims)
        standard = self.standard_dimension or dims[0]
        if standard not in dims:
            raise InputError(f"standard dimension {standard!r} is not among {list(dims)}")
        object.__setattr__(self, "standard_dimension", standard)
        object.__setattr__(self, "cases", tuple(Case(c) for c in self.cases))
        forms = tuple(Form(f) for f in self.forms)
        bad = [f.value for f in forms if f not in PAIR_FORMS]
        if bad:
            raise InputError(f"forms {bad} cannot be evaluated on document pairs")
        object.__setattr__(self, "forms", forms)
        if self.min_cooccurrence < 1:
            raise InputError("min_cooccurrence must be at least 1")
        if not 0.0 <= self.half_tolerance <= 0.5:
            raise InputError("half_tolerance must lie in [0, 0.5]")
        if self.output_format not in ("json", "csv"):
            raise InputError(f"unknown output format {self.output_format!r}")

    def to_dict(self) -> dict:
        return {
            "dimensions": list(self.dimensions),
            "standard_dimension": self.standard_dimension,
            "cases": [c.value for c in self.cases],
            "forms": [f.value for f in self.forms],
            "min_cooccurrence": self.min_cooccurrence,
            "half_tolerance": self.half_tolerance,
            "oracle_mode": self.oracle_mode,
            "output_format": self.output_format,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(
            dimensions=tuple(d["dimensions"]),
            standard_dimension=d["standard_dimension"],
            cases=tuple(d["cases"]),
            forms=tuple(d["forms"]),
            min_cooccurrence=d["min_cooccurrence"],
            half_tolerance=d["half_tolerance"],
            oracle_mode=d["oracle_mode"],
            output_format=d["output_format"],
        )


def _num(x):
    """Round a float to the serialized precision; other values pass through."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.{SIG_DIGITS}g}")


def result_to_dict(r: BellResult) -> dict:
    return {
        "form": r.form.value,
        "metadata": dict(r.metadata),
        "statistic": _num(r.statistic),
        "signed": _num(r.signed),
        "bound_low": _num(r.bound_low),
        "bound_high": _num(r.bound_high),
        "violated": r.violated,
        "terms": {k: _num(v) for k, v in r.terms.items()},
        "weights": dict(r.weights),
    }


def _schmidt_dict(psi) -> dict:
    s = schmidt_decompose(psi)
    return {"singular_values": [_num(v) for v in s.singular_values], "rank": s.rank}


def evaluate_pair(pair: DocumentPair, suite: SuiteConfig) -> dict:
    try:
        results = run_suite(pair.d1, pair.d2, suite)
        psi = tensor_product(pair.d1.vector(), pair.d2.vector())
    except InputError as exc:
        raise InputError(
            f"case {pair.case.value} pair {pair.d1.doc_id}/{pair.d2.doc_id} "
            f"(queries {', '.join(pair.query_ids)}): {exc}"
        ) from exc
    return {
        "case": pair.case.value,
        "d1": pair.d1.doc_id,
        "d2": pair.d2.doc_id,
        "query_ids": list(pair.query_ids),
        "state_query": pair.state_query,
        "cooccurrences": pair.cooccurrences,
        "schmidt": _schmidt_dict(psi),
        "results": [result_to_dict(r) for r in results],
    }


def oracle_block() -> dict:
    """phi_plus evaluated with the CHSH-optimal observables."""
    psi = bell_state("phi_plus")
    result = chsh_composite(psi, *optimal_chsh_observables())
    inv = rotational_invariance_check(psi, [rotation_basis(t) for t in ORACLE_ANGLES])
    return {
        "state": "phi_plus",
        "coefficients": [_num(c) for c in psi.coefficients],
        "schmidt": _schmidt_dict(psi),
        "rotational_invariance": {
            "angles": [_num(t) for t in ORACLE_ANGLES],
            "invariant": inv.invariant,
            "max_deviation": _num(max(inv.deviations)),
        },
        "results": [result_to_dict(result)],
    }


def order_effect_rows(queries: Sequence[StatedQuery], dimensions: Sequence[str]) -> list[dict]:
    rows = []
    for q in queries:
        for rec in q.group.records:
            doc = q.states[rec.doc_id]
            for a, b in itertools.combinations(dimensions, 2):
                eff = order_effect(doc, a, b)
                rows.append(
                    {
                        "query_id": q.query_id,
                        "doc_id": doc.doc_id,
                        "dim_a": a,
                        "dim_b": b,
                        "forward": _num(eff.forward),
                        "reverse": _num(eff.reverse),
                        "ratio": _num(eff.ratio),
                    }
                )
    return rows


def compute_aggregates(report: dict) -> dict:
    """Aggregates recomputed from the per-pair (and oracle) entries of a report dict."""
    pairs = report["pairs"]
    by_case = {c.value: 0 for c in Case}
    evaluations: dict[str, int] = {}
    violations: dict[str, int] = {}
    maxima: dict[str, float] = {}
    nonseparable = 0
    entries = list(pairs)
    if report.get("oracle"):
        entries.append(report["oracle"])
    for entry in pairs:
        by_case[entry["case"]] += 1
        if entry["schmidt"]["rank"] > 1:
            nonseparable += 1
    for entry in entries:
        for r in entry["results"]:
            form = r["form"]
            evaluations[form] = evaluations.get(form, 0) + 1
            violations[form] = violations.get(form, 0) + int(r["violated"])
            if form not in maxima or r["statistic"] > maxima[form]:
                maxima[form] = r["statistic"]
    return {
        "pairs_tested": len(pairs),
        "pairs_by_case": by_case,
        "nonseparable_pairs": nonseparable,
        "evaluations_by_form": dict(sorted(evaluations.items())),
        "violations_by_form": dict(sorted(violations.items())),
        "max_statistic_by_form": dict(sorted(maxima.items())),
        "violations_total": sum(violations.values()),
    }


def run_pipeline(
    source: Iterable[str] | Sequence[QueryGroup],
    config: RunConfig | None = None,
    workers: int = 1,
) -> dict:
    """Parse (if needed), select pairs per case, evaluate everything, aggregate.

    ``source`` is either an iterable of log lines or already parsed groups.
    The result is a JSON-ready report dict; ``workers`` only affects speed.
    """
    config = config or RunConfig()
    items = list(source)
    if items and isinstance(items[0], QueryGroup):
        groups = items
    else:
        groups = parse_log(items, config.dimensions)
    queries = prepare(groups, config.standard_dimension, config.dimensions)

    pairs: list[DocumentPair] = []
    if Case.I in config.cases:
        pairs += select_case1(queries)
    if Case.II in config.cases:
        pairs += select_case2(queries)
    correlated = []
    if Case.III in config.cases:
        pairs += select_case3(queries, config.min_cooccurrence, config.half_tolerance)
        correlated = select_correlated(queries, config.min_cooccurrence)

    suite = SuiteConfig(config.dimensions, config.forms)
    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(lambda p: evaluate_pair(p, suite), pairs))
    else:
        entries = [evaluate_pair(p, suite) for p in pairs]

    report = {
        "config": config.to_dict(),
        "pairs": entries,
        "case3_correlated": [
            {
                "d1": p.d1.doc_id,
                "d2": p.d2.doc_id,
                "query_ids": list(p.query_ids),
                "cooccurrences": p.cooccurrences,
                "both_sat": p.both_sat,
                "both_unclicked": p.both_unclicked,
            }
            for p in correlated
        ],
        "order_effects": order_effect_rows(queries, config.dimensions),
        "oracle": oracle_block() if config.oracle_mode else None,
    }
    report["aggregates"] = compute_aggregates(report)
    return report


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return str(v)


CSV_HEADER = ("section", "key", "field", "value")


def _result_rows(section: str, key: str, r: dict):
    dims = ",".join(r["metadata"].get("dimensions", []))
    rkey = f"{key}|{r['form']}|{dims}"
    for name in ("statistic", "signed", "bound_low", "bound_high", "violated"):
        yield (section, rkey, name, _fmt(r[name]))
    for label, value in r["terms"].items():
        yield (section, rkey, f"term:{label}", _fmt(value))


def flatten_report(report: dict) -> list[tuple[str, str, str, str]]:
    """Long-form rows shared by the CSV writer and the JSON/CSV consistency check."""
    rows = []
    for name, value in report["config"].items():
        rows.append(("config", "", name, _fmt(value)))
    for e in report["pairs"]:
        key = f"{e['case']}|{'+'.join(e['query_ids'])}|{e['d1']}|{e['d2']}"
        s1, s2 = e["schmidt"]["singular_values"]
        rows += [
            ("schmidt", key, "s1", _fmt(s1)),
            ("schmidt", key, "s2", _fmt(s2)),
            ("schmidt", key, "rank", _fmt(e["schmidt"]["rank"])),
        ]
        for r in e["results"]:
            rows.extend(_result_rows("bell", key, r))
    for c in report["case3_correlated"]:
        key = f"{c['d1']}|{c['d2']}"
        for name in ("cooccurrences", "both_sat", "both_unclicked"):
            rows.append(("case3_correlated", key, name, _fmt(c[name])))
    for row in report["order_effects"]:
        key = f"{row['query_id']}|{row['doc_id']}|{row['dim_a']}|{row['dim_b']}"
        for name in ("forward", "reverse", "ratio"):
            rows.append(("order_effects", key, name, _fmt(row[name])))
    oracle = report.get("oracle")
    if oracle:
        s1, s2 = oracle["schmidt"]["singular_values"]
        rows += [
            ("oracle", "phi_plus", "s1", _fmt(s1)),
            ("oracle", "phi_plus", "s2", _fmt(s2)),
            ("oracle", "phi_plus", "rank", _fmt(oracle["schmidt"]["rank"])),
            ("oracle", "phi_plus", "rotational_invariance",
             _fmt(oracle["rotational_invariance"]["invariant"])),
        ]
        for r in oracle["results"]:
            rows.extend(_result_rows("oracle", "phi_plus", r))
    agg = report["aggregates"]
    for name, value in agg.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                rows.append(("aggregates", name, sub, _fmt(v)))
        else:
            rows.append(("aggregates", "", name, _fmt(value)))
    return rows


def dumps(report: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(flatten_report(report))
        return buf.getvalue()
    raise InputError(f"unknown output format {fmt!r}")


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_report(path: str | os.PathLike) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def read_csv_rows(path: str | os.PathLike) -> list[tuple[str, ...]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise InputError(f"{path}: not a report CSV")
    return [tuple(r) for r in rows[1:]]


def invariant_failures(report: dict) -> list[str]:
    """Internal consistency problems in a finished report; empty when sound."""
    problems = []
    if compute_aggregates(report) != report["aggregates"]:
        problems.append("aggregates do not match per-pair entries")
    for e in report["pairs"]:
        sv = e["schmidt"]["singular_values"]
        if abs(sum(v * v for v in sv) - 1.0) > 1e-9:
            problems.append(f"Schmidt weights of {e['d1']}/{e['d2']} do not sum to 1")
    return problems


__all__ = [
    "RunConfig",
    "compute_aggregates",
    "dumps",
    "evaluate_pair",
    "flatten_report",
    "invariant_failures",
    "load_report",
    "oracle_block",
    "read_csv_rows",
    "run_pipeline",
    "write_atomic",
]
