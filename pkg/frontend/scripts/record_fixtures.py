#!/usr/bin/env python3
"""Record API response fixtures for the console's contract tests.

Runs the real service in-process against a small crafted corpus and dumps
selected responses as JSON. Re-run after changing API shapes:

    python3 scripts/record_fixtures.py
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from triagekit.api import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

CSV_HEADER = "ID,Summary,Description,Assignee,Business Process,Created Date,Module,Priority,Status,Region"

# T001..T004 share controlled slices of T001's 16-word vocabulary so the
# fixture query (T001's indexed text) lands one hit in each band:
# 1.0 / ~0.68 / ~0.51 / ~0.05 under the default thresholds.
QUERY_WORDS = [f"qword{c}" for c in "abcdefghijklmnop"]
_T001 = " ".join(QUERY_WORDS)
_T002 = " ".join(QUERY_WORDS[:13] + ["uniaa"])
_T003 = " ".join(QUERY_WORDS[:10] + ["uniab"])
_T004 = " ".join(QUERY_WORDS[:2] + ["uniac", "uniad", "uniae", "uniaf", "uniag"])

ROWS = [
    f"T001,{_T001},,ana,auth,2023-01-01 09:00:00,web,High,Open,emea",
    f"T002,{_T002},,ana,auth,2023-01-02 09:00:00,web,High,Open,emea",
    f"T003,{_T003},,bo,billing,2023-01-03 09:00:00,web,Medium,Open,apac",
    f"T004,{_T004},,bo,billing,2023-01-04 09:00:00,billing,Medium,Open,apac",
    "T005,invoice payment refund,invoice payment charge,bo,billing,2023-01-05 09:00:00,billing,High,Open,apac",
    "T006,invoice refund charge,payment charge currency,bo,billing,2023-01-06 09:00:00,billing,High,Open,apac",
    "T007,invoice currency charge,refund payment currency,bo,billing,2023-01-07 09:00:00,billing,High,Open,apac",
    "T008,login password lockout,login password session,ana,auth,2023-01-08 09:00:00,web,High,Open,emea",
    "T009,login session token,password token lockout,ana,auth,2023-01-09 09:00:00,web,Medium,Open,emea",
    "T010,login lockout alert,password lockout alert,ana,auth,2023-01-10 09:00:00,web,High,Open,emea",
    "T011,dashboard export widget,dashboard export chart,cyd,reports,2023-01-11 09:00:00,reports,Low,Open,apac",
    "T012,dashboard widget chart,export chart metric,cyd,reports,2023-01-12 09:00:00,reports,Low,Open,apac",
    "T013,dashboard metric export,widget chart metric,cyd,reports,2023-01-13 09:00:00,reports,Low,Open,apac",
]

SCHEMA = [
    {"name": "id", "kind": "predefined", "role": "information", "filter_level": 0, "column_mapping": "ID"},
    {"name": "summary", "kind": "predefined", "role": "information", "filter_level": 0, "column_mapping": "Summary"},
    {"name": "description", "kind": "predefined", "role": "information", "filter_level": 0, "column_mapping": "Description"},
    {"name": "assignee", "kind": "predefined", "role": "information", "filter_level": 0, "column_mapping": "Assignee"},
    {"name": "business_process", "kind": "predefined", "role": "information", "filter_level": 0, "column_mapping": "Business Process"},
    {"name": "created_date", "kind": "predefined", "role": "information", "filter_level": 0,
     "column_mapping": "Created Date", "datetime_format": "%Y-%m-%d %H:%M:%S"},
    {"name": "module_tag", "kind": "predefined", "role": "filter", "filter_level": 1, "column_mapping": "Module"},
    {"name": "priority", "kind": "predefined", "role": "information", "filter_level": 0, "column_mapping": "Priority"},
    {"name": "status", "kind": "predefined", "role": "information", "filter_level": 0, "column_mapping": "Status"},
    {"name": "region", "kind": "custom", "role": "filter", "filter_level": 2, "column_mapping": "Region"},
]

# T001's indexed composition (summary boosted x2, empty description)
QUERY_TEXT = " ".join(QUERY_WORDS * 2)


def dump(name: str, payload: dict) -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")
    print(f"wrote {name}")


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        client = TestClient(create_app(tmp))

        response = client.put("/config/fields", json=SCHEMA)
        assert response.status_code == 200, response.text
        dump("config_fields.json", response.json())

        csv_text = CSV_HEADER + "\n" + "\n".join(ROWS) + "\n"
        response = client.post(
            "/ingest", files={"file": ("console-fixture.csv", csv_text.encode(), "text/csv")}
        )
        assert response.status_code == 200, response.text
        dump("ingest.json", response.json())

        response = client.post("/search", json={"text": QUERY_TEXT, "k": 12})
        assert response.status_code == 200, response.text
        search_payload = response.json()
        bands = {}
        for hit in search_payload["hits"]:
            bands.setdefault(hit["band"], []).append((hit["ticket_id"], round(hit["score"], 3)))
        print("bands:", json.dumps(bands, indent=1))
        assert len(bands) == 4, f"expected hits in all four bands, got {set(bands)}"
        dump("search.json", search_payload)

        response = client.post(
            "/recommend/assignee",
            json={"ticket": {"summary": "login password lockout"}, "train": {"seed": 9}},
        )
        assert response.status_code == 200, response.text
        dump("recommend_before.json", response.json())

        event = {
            "event_id": "fixture-ev-1",
            "ticket_id": "T008",
            "target_field": "assignee",
            "label": "ana",
            "verdict": "accepted",
        }
        response = client.post("/feedback", json=event)
        assert response.status_code == 202, response.text
        dump("feedback_ack.json", response.json())

        response = client.post("/feedback", json=event)
        assert response.status_code == 409
        dump("feedback_duplicate_409.json", response.json())

        response = client.post(
            "/recommend/assignee", json={"ticket": {"summary": "login password lockout"}}
        )
        assert response.status_code == 200
        dump("recommend_after_accept.json", response.json())

        before = {r["label"]: r["score"] for r in
                  json.loads((FIXTURES / "recommend_before.json").read_text())["recommendation"]["ranked"]}
        after = {r["label"]: r["score"] for r in response.json()["recommendation"]["ranked"]}
        assert after["ana"] > before["ana"], "accept must raise the accepted label's score"

        response = client.post(
            "/feedback",
            json={
                "event_id": "fixture-ev-2",
                "ticket_id": "T008",
                "target_field": "assignee",
                "label": "bo",
                "verdict": "rejected",
            },
        )
        assert response.status_code == 202, response.text
        response = client.post(
            "/recommend/assignee", json={"ticket": {"summary": "login password lockout"}}
        )
        assert response.status_code == 200
        dump("recommend_after_reject.json", response.json())
        rejected = {r["label"]: r["score"] for r in response.json()["recommendation"]["ranked"]}
        assert rejected["bo"] < after["bo"], "reject must lower the rejected label's score"

        response = client.post(
            "/themes", json={"method": "LSA+TF", "seed": 4, "tag_field": "module_tag", "lsa_rank": 8}
        )
        assert response.status_code == 200, response.text
        themes_payload = response.json()
        dump("themes.json", themes_payload)

        # the pair endpoint accepts any mined phrase, not only selected ones;
        # T005's summary and description phrases co-occur there by design
        response = client.get(
            "/themes/pair",
            params={"p": "invoice payment refund", "q": "invoice payment charge"},
        )
        assert response.status_code == 200, response.text
        assert response.json()["evidence"]["count"] > 0
        dump("theme_pair.json", response.json())

        phrases = [t["phrase"] for t in themes_payload["report"]["terms"]]

        empty = None
        for a in phrases:
            for b in phrases:
                check = client.get("/themes/pair", params={"p": a, "q": b}).json()
                if check["evidence"]["count"] == 0:
                    empty = check
                    break
            if empty:
                break
        assert empty is not None, "fixture corpus must contain a non-co-occurring pair"
        dump("theme_pair_empty.json", empty)

    return 0


if __name__ == "__main__":
    sys.exit(main())
