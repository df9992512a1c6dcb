"""Scored query-log ingestion, per-query document states and pair selection.

Input is UTF-8 JSON lines, one (query, document) judgment per line::

    {"query_id": "q1", "doc_id": "d7", "scores": {"topicality": 1.3, ...},
     "clicked": true, "sat_clicked": false}

Scores are raw per-dimension ranking scores; unknown extra fields are
ignored, unknown dimension names are rejected.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .hilbert import (
    DEFAULT_DIMENSIONS,
    AmplitudePair,
    DocumentState,
    InputError,
    minmax_normalize,
    validate_dimensions,
)


class LogFormatError(InputError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class Case(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"


@dataclass(frozen=True)
class JudgmentRecord:
    query_id: str
    doc_id: str
    scores: Mapping[str, float]
    clicked: bool
    sat_clicked: bool

    def __post_init__(self):
        if self.sat_clicked and not self.clicked:
            raise InputError(f"{self.query_id}/{self.doc_id}: sat_clicked implies clicked")

    @property
    def unclicked(self) -> bool:
        return not self.clicked


@dataclass(frozen=True)
class QueryGroup:
    query_id: str
    records: tuple[JudgmentRecord, ...]

    def __post_init__(self):
        if not self.records:
            raise InputError(f"query {self.query_id!r} has no records")
        seen = set()
        for rec in self.records:
            if rec.query_id != self.query_id:
                raise InputError(f"record for {rec.query_id!r} filed under {self.query_id!r}")
            if rec.doc_id in seen:
                raise InputError(f"duplicate document {rec.doc_id!r} in query {self.query_id!r}")
            seen.add(rec.doc_id)

    @property
    def sat_clicked(self) -> list[JudgmentRecord]:
        return [r for r in self.records if r.sat_clicked]

    @property
    def unclicked(self) -> list[JudgmentRecord]:
        return [r for r in self.records if r.unclicked]


def _parse_record(obj, lineno, dimensions, source) -> JudgmentRecord:
    if not isinstance(obj, dict):
        raise LogFormatError("record must be a JSON object", lineno, source)
    for key, kind in (("query_id", str), ("doc_id", str), ("scores", dict),
                      ("clicked", bool), ("sat_clicked", bool)):
        if key not in obj:
            raise LogFormatError(f"missing field {key!r}", lineno, source)
        if not isinstance(obj[key], kind):
            raise LogFormatError(f"field {key!r} must be {kind.__name__}", lineno, source)
    raw = obj["scores"]
    unknown = sorted(set(raw) - set(dimensions))
    if unknown:
        raise LogFormatError(f"unknown dimension(s) {unknown}", lineno, source)
    scores = {}
    for dim in dimensions:
        if dim not in raw:
            raise LogFormatError(f"missing score for dimension {dim!r}", lineno, source)
        value = raw[dim]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise LogFormatError(f"score for {dim!r} must be a finite number", lineno, source)
        scores[dim] = float(value)
    if obj["sat_clicked"] and not obj["clicked"]:
        raise LogFormatError("sat_clicked is true but clicked is false", lineno, source)
    return JudgmentRecord(obj["query_id"], obj["doc_id"], scores, obj["clicked"], obj["sat_clicked"])


def parse_log(
    lines: Iterable[str],
    dimensions: Sequence[str] = DEFAULT_DIMENSIONS,
    source: str | None = None,
) -> list[QueryGroup]:
    """Group records by query_id, preserving first-seen query order and record order."""
    dimensions = validate_dimensions(dimensions)
    grouped: dict[str, list[JudgmentRecord]] = {}
    seen: dict[tuple[str, str], int] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LogFormatError(f"malformed JSON ({exc.msg})", lineno, source) from None
        rec = _parse_record(obj, lineno, dimensions, source)
        key = (rec.query_id, rec.doc_id)
        if key in seen:
            raise LogFormatError(
                f"duplicate document {rec.doc_id!r} in query {rec.query_id!r} "
                f"(first seen on line {seen[key]})",
                lineno,
                source,
            )
        seen[key] = lineno
        grouped.setdefault(rec.query_id, []).append(rec)
    return [QueryGroup(qid, tuple(recs)) for qid, recs in grouped.items()]


def build_states(
    group: QueryGroup,
    standard: str,
    dimensions: Sequence[str] = DEFAULT_DIMENSIONS,
) -> list[DocumentState]:
    """One DocumentState per record; scores are min-max normalized within the query."""
    dimensions = validate_dimensions(dimensions)
    if standard not in dimensions:
        raise InputError(f"standard dimension {standard!r} is not configured")
    normalized = {
        dim: minmax_normalize([rec.scores[dim] for rec in group.records]) for dim in dimensions
    }
    states = []
    for i, rec in enumerate(group.records):
        amps = {}
        for dim in dimensions:
            alpha = math.sqrt(normalized[dim][i])
            amps[dim] = AmplitudePair(alpha, math.sqrt(1.0 - alpha * alpha))
        states.append(DocumentState(rec.doc_id, standard, amps))
    return states


@dataclass(frozen=True)
class StatedQuery:
    """A query group together with the document states built from it."""

    group: QueryGroup
    states: Mapping[str, DocumentState]

    @property
    def query_id(self) -> str:
        return self.group.query_id


def prepare(
    groups: Sequence[QueryGroup],
    standard: str,
    dimensions: Sequence[str] = DEFAULT_DIMENSIONS,
) -> list[StatedQuery]:
    return [
        StatedQuery(g, {s.doc_id: s for s in build_states(g, standard, dimensions)})
        for g in groups
    ]


@dataclass(frozen=True)
class DocumentPair:
    case: Case
    d1: DocumentState
    d2: DocumentState
    query_ids: tuple[str, ...]
    cooccurrences: int = 1
    both_sat: int = 0
    both_unclicked: int = 0
    state_query: str = ""

    def __post_init__(self):
        if not self.d1.doc_id < self.d2.doc_id:
            raise InputError(
                f"pair ({self.d1.doc_id!r}, {self.d2.doc_id!r}) is not in canonical order"
            )


def _ordered(states: Mapping[str, DocumentState], a: str, b: str):
    return (states[a], states[b]) if a < b else (states[b], states[a])


def select_case1(queries: Sequence[StatedQuery]) -> list[DocumentPair]:
    """One pair per query with exactly two SAT-clicked documents."""
    pairs = []
    for q in queries:
        sat = q.group.sat_clicked
        if len(sat) == 2:
            d1, d2 = _ordered(q.states, sat[0].doc_id, sat[1].doc_id)
            pairs.append(DocumentPair(Case.I, d1, d2, (q.query_id,), 1, 1, 0, q.query_id))
    return pairs


def select_case2(queries: Sequence[StatedQuery]) -> list[DocumentPair]:
    """Every SAT-clicked document paired with every unclicked one of its query."""
    pairs = []
    for q in queries:
        for sat in q.group.sat_clicked:
            for other in q.group.unclicked:
                d1, d2 = _ordered(q.states, sat.doc_id, other.doc_id)
                pairs.append(DocumentPair(Case.II, d1, d2, (q.query_id,), 1, 0, 0, q.query_id))
    return pairs


@dataclass
class _Cooccurrence:
    query_ids: list[str] = field(default_factory=list)
    both_sat: int = 0
    both_unclicked: int = 0
    mixed: int = 0


def _cooccurrences(queries: Sequence[StatedQuery]) -> dict[tuple[str, str], _Cooccurrence]:
    table: dict[tuple[str, str], _Cooccurrence] = {}
    for q in queries:
        recs = sorted(q.group.records, key=lambda r: r.doc_id)
        for r1, r2 in itertools.combinations(recs, 2):
            entry = table.setdefault((r1.doc_id, r2.doc_id), _Cooccurrence())
            entry.query_ids.append(q.query_id)
            if r1.sat_clicked and r2.sat_clicked:
                entry.both_sat += 1
            elif r1.unclicked and r2.unclicked:
                entry.both_unclicked += 1
            else:
                entry.mixed += 1
    return table


def select_correlated(
    queries: Sequence[StatedQuery], min_cooccurrence: int = 2
) -> list[DocumentPair]:
    """Pairs that co-occur at least ``min_cooccurrence`` times, always judged alike.

    Alike means both SAT-clicked or both unclicked. Each document's state is
    taken from the last co-occurring query in input order.
    """
    by_id = {q.query_id: q for q in queries}
    pairs = []
    for (a, b), entry in sorted(_cooccurrences(queries).items()):
        n = len(entry.query_ids)
        if n < min_cooccurrence or entry.mixed:
            continue
        last = by_id[entry.query_ids[-1]]
        pairs.append(
            DocumentPair(
                Case.III,
                last.states[a],
                last.states[b],
                tuple(entry.query_ids),
                n,
                entry.both_sat,
                entry.both_unclicked,
                last.query_id,
            )
        )
    return pairs


def select_case3(
    queries: Sequence[StatedQuery],
    min_cooccurrence: int = 2,
    half_tolerance: float = 0.0,
) -> list[DocumentPair]:
    """Correlated pairs SAT-clicked together in (about) half of their co-occurrences."""
    return [
        p
        for p in select_correlated(queries, min_cooccurrence)
        if abs(p.both_sat / p.cooccurrences - 0.5) <= half_tolerance + 1e-12
    ]
