import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relbell.hilbert import InputError
from relbell.loglab import (
    Case,
    JudgmentRecord,
    LogFormatError,
    QueryGroup,
    build_states,
    parse_log,
    prepare,
    select_case1,
    select_case2,
    select_case3,
    select_correlated,
)

DIMS = ("topicality", "reliability", "novelty")


def line(qid, did, status="none", **scores):
    full = dict.fromkeys(DIMS, 0.0)
    full.update(scores)
    return json.dumps(
        {
            "query_id": qid,
            "doc_id": did,
            "scores": full,
            "clicked": status in ("sat", "click"),
            "sat_clicked": status == "sat",
        }
    )


def stated(lines):
    return prepare(parse_log(lines, DIMS), "topicality", DIMS)


class TestParse:
    def test_single_query(self):
        lines = [line("q1", "a", "sat"), line("q1", "b"), ""]
        groups = parse_log(lines, DIMS)
        assert [g.query_id for g in groups] == ["q1"]
        assert [r.doc_id for r in groups[0].records] == ["a", "b"]

    def test_grouping_preserves_order(self):
        lines = [
            line("q1", "a"), line("q2", "x"), line("q1", "b"),
            line("q1", "c"), line("q2", "y"), line("q1", "d"),
        ]
        groups = parse_log(lines, DIMS)
        assert [(g.query_id, len(g.records)) for g in groups] == [("q1", 4), ("q2", 2)]

    def test_missing_dimension_names_field_and_line(self):
        bad = json.dumps({"query_id": "q1", "doc_id": "b", "clicked": False, "sat_clicked": False,
                          "scores": {"topicality": 1.0, "reliability": 0.2}})
        with pytest.raises(LogFormatError) as err:
            parse_log([line("q1", "a"), bad], DIMS, source="log.jsonl")
        assert err.value.line == 2
        assert "novelty" in str(err.value)
        assert "log.jsonl" in str(err.value)

    def test_unknown_dimension(self):
        obj = json.loads(line("q1", "a"))
        obj["scores"]["charm"] = 1.0
        with pytest.raises(LogFormatError, match="charm"):
            parse_log([json.dumps(obj)], DIMS)

    def test_duplicate(self):
        with pytest.raises(LogFormatError, match="first seen on line 1"):
            parse_log([line("q1", "a"), line("q1", "a")], DIMS)

    def test_same_doc_across_queries_is_fine(self):
        assert len(parse_log([line("q1", "a"), line("q2", "a")], DIMS)) == 2

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("{not json", "malformed JSON"),
            ("[1, 2]", "JSON object"),
            ('{"query_id": "q1"}', "doc_id"),
        ],
    )
    def test_malformed(self, text, fragment):
        with pytest.raises(LogFormatError, match=fragment) as err:
            parse_log([line("q1", "a"), text], DIMS)
        assert err.value.line == 2

    @pytest.mark.parametrize(
        "key, value",
        [("clicked", "yes"), ("query_id", 3), ("scores", [1.0])],
    )
    def test_ill_typed(self, key, value):
        obj = json.loads(line("q1", "a"))
        obj[key] = value
        with pytest.raises(LogFormatError, match=key):
            parse_log([json.dumps(obj)], DIMS)

    @pytest.mark.parametrize("value", [True, "1.0", None])
    def test_bad_score(self, value):
        obj = json.loads(line("q1", "a"))
        obj["scores"]["novelty"] = value
        with pytest.raises(LogFormatError, match="novelty"):
            parse_log([json.dumps(obj)], DIMS)

    def test_non_finite_score(self):
        text = line("q1", "a").replace('"novelty": 0.0', '"novelty": NaN')
        with pytest.raises(LogFormatError, match="finite"):
            parse_log([text], DIMS)

    def test_sat_without_click(self):
        obj = json.loads(line("q1", "a"))
        obj["sat_clicked"] = True
        with pytest.raises(LogFormatError, match="sat_clicked"):
            parse_log([json.dumps(obj)], DIMS)

    def test_record_invariant(self):
        with pytest.raises(InputError):
            JudgmentRecord("q", "d", {}, clicked=False, sat_clicked=True)

    def test_group_invariant(self):
        rec = JudgmentRecord("q", "d", {}, True, False)
        with pytest.raises(InputError):
            QueryGroup("q", (rec, rec))
        with pytest.raises(InputError):
            QueryGroup("other", (rec,))


class TestBuildStates:
    def test_normalized_alphas(self):
        lines = [line("q1", d, reliability=s) for d, s in (("a", 2.0), ("b", 1.0), ("c", 0.0))]
        states = build_states(parse_log(lines, DIMS)[0], "topicality", DIMS)
        alphas = [s.pair("reliability").alpha for s in states]
        assert alphas == pytest.approx([1.0, math.sqrt(0.5), 0.0], abs=1e-12)
        for s in states:
            p = s.pair("reliability")
            assert p.alpha**2 + p.beta**2 == pytest.approx(1.0, abs=1e-12)

    def test_single_document_is_degenerate(self):
        states = build_states(parse_log([line("q1", "a", novelty=5.0)], DIMS)[0], "topicality", DIMS)
        for dim in DIMS:
            assert states[0].pair(dim).alpha == pytest.approx(math.sqrt(0.5), abs=1e-15)

    def test_top_document_is_certain(self):
        lines = [line("q1", "a", topicality=3.0), line("q1", "b", topicality=-1.0)]
        states = build_states(parse_log(lines, DIMS)[0], "topicality", DIMS)
        assert states[0].probability("topicality") == pytest.approx(1.0, abs=1e-15)
        assert states[1].probability("topicality") == pytest.approx(0.0, abs=1e-15)

    def test_standard_must_be_configured(self):
        with pytest.raises(InputError):
            build_states(parse_log([line("q1", "a")], DIMS)[0], "habit", DIMS)

    @given(
        st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=6),
        st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=4),
    )
    def test_normalization_is_per_query(self, first, second):
        lines = [line("q1", f"a{i}", reliability=s) for i, s in enumerate(first)]
        alone = stated(lines)[0].states
        lines += [line("q2", f"b{i}", reliability=s) for i, s in enumerate(second)]
        together = stated(lines)[0].states
        for doc_id, state in alone.items():
            assert together[doc_id].pair("reliability") == state.pair("reliability")


def five_queries():
    return stated(
        [
            line("q1", "a", "sat"), line("q1", "b", "sat"), line("q1", "c"),
            line("q2", "a", "sat"), line("q2", "d", "click"),
            line("q3", "e", "sat"), line("q3", "f", "sat"), line("q3", "g", "sat"),
            line("q4", "h", "sat"), line("q4", "i", "sat"),
            line("q5", "j"), line("q5", "k"),
        ]
    )


class TestCase1:
    def test_exactly_two(self):
        pairs = select_case1(five_queries())
        assert [(p.d1.doc_id, p.d2.doc_id) for p in pairs] == [("a", "b"), ("h", "i")]
        assert all(p.case is Case.I and p.both_sat == 1 for p in pairs)

    def test_canonical_order(self):
        pairs = select_case1(stated([line("q1", "z", "sat"), line("q1", "m", "sat")]))
        assert (pairs[0].d1.doc_id, pairs[0].d2.doc_id) == ("m", "z")


class TestCase2:
    def test_one_by_three(self):
        queries = stated([line("q", "s", "sat"), line("q", "u1"), line("q", "u2"), line("q", "u3")])
        assert len(select_case2(queries)) == 3

    def test_two_by_two(self):
        queries = stated([line("q", "s1", "sat"), line("q", "s2", "sat"), line("q", "u1"), line("q", "u2")])
        pairs = select_case2(queries)
        assert len(pairs) == 4
        assert all(p.case is Case.II for p in pairs)

    def test_plain_clicks_are_not_unclicked(self):
        queries = stated([line("q", "s", "sat"), line("q", "c1", "click"), line("q", "c2", "click")])
        assert select_case2(queries) == []

    def test_from_five_queries(self):
        pairs = select_case2(five_queries())
        assert [(p.d1.doc_id, p.d2.doc_id) for p in pairs] == [("a", "c"), ("b", "c")]


class TestCase3:
    def test_half_and_half(self):
        queries = stated(
            [line("q1", "x", "sat"), line("q1", "y", "sat"), line("q2", "x"), line("q2", "y")]
        )
        pairs = select_case3(queries)
        assert len(pairs) == 1
        p = pairs[0]
        assert (p.cooccurrences, p.both_sat, p.both_unclicked) == (2, 1, 1)
        assert p.query_ids == ("q1", "q2")
        assert p.state_query == "q2"

    def test_three_to_one_rejected(self):
        lines = []
        for i, status in enumerate(["sat", "sat", "sat", "none"]):
            lines += [line(f"q{i}", "x", status), line(f"q{i}", "y", status)]
        queries = stated(lines)
        assert len(select_correlated(queries)) == 1
        assert select_case3(queries, half_tolerance=0.1) == []
        assert len(select_case3(queries, half_tolerance=0.25)) == 1

    def test_mixed_rejected(self):
        queries = stated(
            [line("q1", "x", "sat"), line("q1", "y", "sat"),
             line("q2", "x"), line("q2", "y"),
             line("q3", "x", "sat"), line("q3", "y")]
        )
        assert select_correlated(queries) == []

    def test_min_cooccurrence(self):
        queries = stated([line("q1", "x", "sat"), line("q1", "y", "sat")])
        assert select_correlated(queries) == []
        assert len(select_correlated(queries, min_cooccurrence=1)) == 1

    def test_state_from_last_query(self):
        queries = stated(
            [
                line("q1", "x", "sat", novelty=1.0), line("q1", "y", "sat"),
                line("q2", "x", novelty=0.0), line("q2", "y"), line("q2", "z", novelty=2.0),
            ]
        )
        pair = select_case3(queries)[0]
        assert pair.d1.probability("novelty") == pytest.approx(0.0, abs=1e-15)


statuses = st.sampled_from(["sat", "click", "none"])


@st.composite
def logs(draw):
    docs = [f"d{i}" for i in range(5)]
    lines = []
    for q in range(draw(st.integers(1, 6))):
        chosen = draw(st.lists(st.sampled_from(docs), min_size=1, max_size=5, unique=True))
        lines += [line(f"q{q}", d, draw(statuses)) for d in chosen]
    return lines


class TestProperties:
    @settings(max_examples=150)
    @given(logs())
    def test_case_pairs_are_canonical_and_well_typed(self, lines):
        queries = stated(lines)
        for q in queries:
            sat = {r.doc_id for r in q.group.sat_clicked}
            unclicked = {r.doc_id for r in q.group.unclicked}
            assert not sat & unclicked
        for p in select_case1(queries):
            q = next(q for q in queries if q.query_id == p.query_ids[0])
            assert {p.d1.doc_id, p.d2.doc_id} == {r.doc_id for r in q.group.sat_clicked}
        case2 = select_case2(queries)
        assert len(case2) == sum(len(q.group.sat_clicked) * len(q.group.unclicked) for q in queries)
        for p in select_correlated(queries):
            assert p.d1.doc_id < p.d2.doc_id
            assert p.both_sat + p.both_unclicked == p.cooccurrences == len(p.query_ids)
        for p in select_case3(queries):
            assert 2 * p.both_sat == p.cooccurrences
