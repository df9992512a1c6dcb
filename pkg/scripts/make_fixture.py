"""Regenerate the bundled synthetic judgment log and its expected pair counts.

The log stands in for a real scored query log. Every query is laid out by
hand below as (doc_id, click status) so the expected case counts follow
from the layout alone:

  case I   = queries with exactly two SAT clicks
  case II  = sum over queries of (#SAT clicked) x (#unclicked)
  case III = recurring pairs that are always judged alike and SAT-clicked
             together in exactly half of their co-occurrences

Usage: python scripts/make_fixture.py [--out-dir src/relbell/data]
"""

import argparse
import json
from pathlib import Path

import numpy as np

DIMENSIONS = (
    "topicality",
    "reliability",
    "understandability",
    "interest",
    "habit",
    "scope",
    "novelty",
)

# status: "sat" (clicked, >=30 s dwell), "click" (clicked only), "none" (unclicked)
QUERIES = {
    "q01": [("worked-doc", "sat"), ("q01-a", "sat"), ("q01-b", "none")],
    "q02": [("q02-a", "sat"), ("q02-b", "sat"), ("q02-c", "click"), ("q02-d", "none"), ("q02-e", "none")],
    "q03": [("q03-a", "sat"), ("q03-b", "sat")],
    "q04": [("q04-a", "sat"), ("q04-b", "none"), ("q04-c", "none"), ("q04-d", "none")],
    "q05": [("q05-a", "sat"), ("q05-b", "click"), ("q05-c", "click"), ("q05-d", "none")],
    "q06": [("q06-a", "sat"), ("q06-b", "sat"), ("q06-c", "sat"), ("q06-d", "none")],
    "q07": [("q07-a", "click"), ("q07-b", "click"), ("q07-c", "none"), ("q07-d", "none")],
    "q08": [("q08-a", "none"), ("q08-b", "none"), ("q08-c", "none"), ("q08-d", "none")],
    "q09": [("q09-a", "sat"), ("q09-b", "sat"), ("q09-c", "none"), ("q09-d", "none")],
    "q10": [("q10-a", "sat")],
    "q11": [("q11-a", "sat"), ("q11-b", "none")],
    "q12": [("q12-a", "sat"), ("q12-b", "sat"), ("q12-c", "sat"), ("q12-d", "sat")],
    # r-alpha / r-beta: 2x both SAT, 2x both unclicked -> half/half pair
    "q13": [("r-alpha", "sat"), ("r-beta", "sat"), ("q13-a", "none")],
    "q14": [("r-alpha", "sat"), ("r-beta", "sat"), ("q14-a", "click"), ("q14-b", "none")],
    "q15": [("q15-a", "sat"), ("r-alpha", "none"), ("r-beta", "none")],
    "q16": [("q16-a", "sat"), ("r-alpha", "none"), ("r-beta", "none"), ("q16-b", "none")],
    # r-gamma / r-delta: always alike but 3 of 4 SAT -> correlated only
    "q17": [("r-gamma", "sat"), ("r-delta", "sat"), ("q17-a", "none")],
    "q18": [("r-gamma", "sat"), ("r-delta", "sat")],
    "q19": [("r-gamma", "sat"), ("r-delta", "sat"), ("q19-a", "sat")],
    "q20": [("q20-a", "sat"), ("r-gamma", "none"), ("r-delta", "none")],
    # r-eps / r-zeta: judged differently once -> not correlated
    "q21": [("r-eps", "sat"), ("r-zeta", "sat"), ("q21-a", "none")],
    "q22": [("r-eps", "sat"), ("r-zeta", "none"), ("q22-a", "none")],
    # r-eta / r-theta: co-occur once only
    "q23": [("r-eta", "sat"), ("r-theta", "sat")],
    "q24": [("q24-a", "sat"), ("q24-b", "sat"), ("q24-c", "none"), ("q24-d", "none"), ("q24-e", "none")],
}

# Raw scores of the three q01 documents. Min-max over q01 maps worked-doc to
# 0.9715**2 on reliability and 0.3535**2 on topicality, i.e. the amplitudes
# of the worked order-effect example.
Q01_SCORES = {
    "worked-doc": {"reliability": 0.9715**2, "topicality": 0.3535**2},
    "q01-a": {"reliability": 0.0, "topicality": 0.0},
    "q01-b": {"reliability": 1.0, "topicality": 1.0},
}


def expected_counts():
    case1 = sum(1 for docs in QUERIES.values() if sum(s == "sat" for _, s in docs) == 2)
    case2 = sum(
        sum(s == "sat" for _, s in docs) * sum(s == "none" for _, s in docs)
        for docs in QUERIES.values()
    )
    return {
        "queries": len(QUERIES),
        "records": sum(len(d) for d in QUERIES.values()),
        "case_I": case1,
        "case_II": case2,
        "case_III": 1,
        "case_III_correlated": 2,
        "case_III_pair": ["r-alpha", "r-beta"],
        "order_effect_doc": {"query_id": "q01", "doc_id": "worked-doc"},
    }


def records(seed=20190101):
    rng = np.random.default_rng(seed)
    for qid, docs in QUERIES.items():
        for doc_id, status in docs:
            scores = {dim: round(float(rng.uniform(-2.0, 3.0)), 6) for dim in DIMENSIONS}
            if qid == "q01":
                fixed = Q01_SCORES[doc_id]
                default = {"worked-doc": 0.5, "q01-a": 0.0, "q01-b": 1.0}[doc_id]
                scores = {dim: fixed.get(dim, default) for dim in DIMENSIONS}
            yield {
                "query_id": qid,
                "doc_id": doc_id,
                "scores": scores,
                "clicked": status in ("sat", "click"),
                "sat_clicked": status == "sat",
            }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    default_out = Path(__file__).resolve().parents[1] / "src" / "relbell" / "data"
    parser.add_argument("--out-dir", type=Path, default=default_out)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    log_path = args.out_dir / "synthetic_log.jsonl"
    with open(log_path, "w", encoding="utf-8") as fh:
        for rec in records():
            fh.write(json.dumps(rec) + "\n")
    exp_path = args.out_dir / "synthetic_log.expected.json"
    exp_path.write_text(json.dumps(expected_counts(), indent=2) + "\n", encoding="utf-8")
    print(f"wrote {log_path} and {exp_path}")


if __name__ == "__main__":
    main()
