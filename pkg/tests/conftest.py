"""Shared fixtures: toy corpora, separable synthetic corpora, CSV files."""

from __future__ import annotations

from datetime import datetime, timezone

import numpy as np
import pytest

from triagekit.model import Corpus, TicketRecord, default_schema


def utc(day: int, hour: int = 12, month: int = 1, year: int = 2023) -> datetime:
    return datetime(year, month, day, hour, 0, 0, tzinfo=timezone.utc)


def make_ticket(
    i: int,
    summary: str,
    description: str = "",
    assignee: str = "",
    business_process: str = "",
    module: str = "web",
    day: int = 1,
    status: str = "Open",
) -> TicketRecord:
    return TicketRecord(
        id=f"T{i:04d}",
        summary=summary,
        description=description,
        assignee=assignee,
        business_process=business_process,
        created_date=utc(day),
        module_tag=module,
        priority="Medium",
        status=status,
    )


@pytest.fixture
def toy_corpus() -> Corpus:
    tickets = [
        make_ticket(1, "login failure on portal page", "user cannot login to the portal",
                    assignee="ana", business_process="auth", module="web", day=1),
        make_ticket(2, "payment gateway timeout", "checkout payment gateway timed out",
                    assignee="bo", business_process="billing", module="billing", day=5),
        make_ticket(3, "password reset email missing", "reset email never arrives",
                    assignee="ana", business_process="auth", module="web", day=9),
    ]
    return Corpus.build(default_schema(), tickets)


# Three topics with fully disjoint vocabularies: any margin classifier
# separates them, which pins down protocol-level expectations.
TOPIC_WORDS = {
    "auth": ["login", "password", "session", "token", "credential", "signin", "lockout", "expiry"],
    "billing": ["invoice", "payment", "refund", "charge", "gateway", "receipt", "tax", "currency"],
    "reports": ["dashboard", "export", "chart", "aggregate", "csv", "widget", "metric", "pivot"],
}


def separable_corpus(n_per_class: int = 50, seed: int = 7, with_dates: bool = True) -> Corpus:
    rng = np.random.default_rng(seed)
    tickets = []
    i = 0
    for label, words in TOPIC_WORDS.items():
        for _ in range(n_per_class):
            pick = [words[rng.integers(len(words))] for _ in range(6)]
            tickets.append(
                TicketRecord(
                    id=f"S{i:04d}",
                    summary=" ".join(pick[:3]),
                    description=" ".join(pick[3:]),
                    assignee=f"dev-{label}",
                    business_process=label,
                    created_date=utc(1 + (i % 27)) if with_dates else None,
                    module_tag=label,
                    priority="Medium",
                    status="Open",
                )
            )
            i += 1
    return Corpus.build(default_schema(), tickets)


@pytest.fixture(scope="session")
def separable600() -> Corpus:
    return separable_corpus(n_per_class=200, seed=11)


def random_corpus(n_docs: int = 200, seed: int = 0) -> Corpus:
    """Random-text corpus; every ticket carries one unique marker word."""
    rng = np.random.default_rng(seed)
    base = [
        "login", "portal", "payment", "gateway", "timeout", "reset", "password",
        "email", "export", "dashboard", "crash", "render", "session", "token",
        "invoice", "refund", "charge", "widget", "metric", "filter", "queue",
        "batch", "upload", "sync", "cache", "proxy", "cluster", "backup",
    ]
    modules = ["web", "billing", "reports", "batch"]
    tickets = []
    for i in range(n_docs):
        n_sum = int(rng.integers(2, 6))
        n_desc = int(rng.integers(0, 9))
        marker = "q" + _alpha_suffix(i)
        summary = " ".join(rng.choice(base, size=n_sum)) + " " + marker
        description = " ".join(rng.choice(base, size=n_desc)) if n_desc else ""
        tickets.append(
            TicketRecord(
                id=f"R{i:04d}",
                summary=summary,
                description=description,
                assignee=f"dev{int(rng.integers(5))}",
                business_process="",
                created_date=utc(1 + (i % 27), month=1 + (i % 2)),
                module_tag=modules[int(rng.integers(len(modules)))],
                priority="Medium",
                status="Open",
            )
        )
    return Corpus.build(default_schema(), tickets)


def _alpha_suffix(i: int) -> str:
    letters = "abcdefghijklmnopqrstuvwxyz"
    out = ""
    i += 1
    while i:
        i, rem = divmod(i - 1, 26)
        out = letters[rem] + out
    return out


CSV_HEADER = "ID,Summary,Description,Assignee,Business Process,Created Date,Module,Priority,Status"


def write_fixture_csv(path, rows: list[str]) -> None:
    path.write_text(CSV_HEADER + "\n" + "\n".join(rows) + "\n", encoding="utf-8")


def good_csv_rows(n: int = 20) -> list[str]:
    rows = []
    labels = ["auth", "billing", "reports"]
    people = ["ana", "bo", "cyd"]
    words = {
        "auth": "login password lockout",
        "billing": "invoice payment refund",
        "reports": "dashboard export widget",
    }
    for i in range(n):
        label = labels[i % 3]
        rows.append(
            f"K{i:03d},{words[label]} issue {i},detail {words[label]},"
            f"{people[i % 3]},{label},2023-01-{1 + i % 27:02d} 09:00:00,{label},High,Open"
        )
    return rows
