"""Comment-level records, their per-article summaries, and a synthetic generator.

Input is a flat comment table, CSV or JSON lines, with the columns
``article_id,user_id,disclosed,timestamp,source`` (the last two optional).
"""

from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .game import GameSpec

CSV_COLUMNS = ("article_id", "user_id", "disclosed", "timestamp", "source")
REQUIRED = ("article_id", "user_id", "disclosed")
_TRUE = {"true", "1"}
_FALSE = {"false", "0"}


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class CommentRecord:
    article_id: str
    user_id: str
    disclosed: bool
    timestamp: str | None = None
    source: str | None = None

    def __post_init__(self):
        if not self.article_id:
            raise ValueError("empty article_id")
        if not self.user_id:
            raise ValueError("empty user_id")


@dataclass(frozen=True)
class ArticleAggregate:
    """Comment total ``R`` and number of disclosing users ``S`` of one article."""

    article_id: str
    R: int
    S: int
    user_ids: tuple[str, ...] = ()


@dataclass
class LoadResult:
    records: list[CommentRecord]
    rejected: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def parse_disclosed(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)) and value in (0, 1):
        return bool(value)
    text = str(value).strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    raise ValueError(f"bad disclosed value {value!r}")


def _record_from_row(row: dict) -> CommentRecord:
    def opt(key):
        v = row.get(key)
        if v is None:
            return None
        v = str(v).strip()
        return v or None

    return CommentRecord(
        article_id=str(row.get("article_id") or "").strip(),
        user_id=str(row.get("user_id") or "").strip(),
        disclosed=parse_disclosed(row.get("disclosed")),
        timestamp=opt("timestamp"),
        source=opt("source"),
    )


def load_records(path, fmt: str | None = None) -> LoadResult:
    """Read and validate a comment table.

    Malformed rows are skipped and reported as ``(line_number, reason)``.
    Raises :class:`DatasetError` if a required column is missing or no row
    survives validation.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    fmt = fmt or ("jsonl" if path.suffix.lower() in (".jsonl", ".json", ".ndjson") else "csv")
    records: list[CommentRecord] = []
    rejected: list[tuple[int, str]] = []
    if fmt == "csv":
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = [h.strip() for h in (reader.fieldnames or [])]
            missing = [c for c in REQUIRED if c not in header]
            if missing:
                raise DatasetError(f"missing required column(s): {', '.join(missing)}")
            reader.fieldnames = header
            for row in reader:
                line = reader.line_num
                try:
                    records.append(_record_from_row(row))
                except ValueError as exc:
                    rejected.append((line, str(exc)))
    elif fmt == "jsonl":
        with path.open(encoding="utf-8") as fh:
            for line, text in enumerate(fh, start=1):
                if not text.strip():
                    continue
                try:
                    row = json.loads(text)
                    if not isinstance(row, dict):
                        raise ValueError("line is not a JSON object")
                    missing = [c for c in REQUIRED if c not in row]
                    if missing:
                        raise ValueError(f"missing key(s): {', '.join(missing)}")
                    records.append(_record_from_row(row))
                except ValueError as exc:
                    rejected.append((line, str(exc)))
    else:
        raise DatasetError(f"unknown format {fmt!r}; expected csv or jsonl")
    if not records:
        raise DatasetError("zero valid rows")
    return LoadResult(records, rejected)


def write_records_csv(records, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(
                [r.article_id, r.user_id, "1" if r.disclosed else "0", r.timestamp or "", r.source or ""]
            )


def aggregate_articles(records) -> list[ArticleAggregate]:
    """Per-article comment count and number of distinct disclosing users.

    A user counts once towards ``S`` no matter how many of their comments
    in that article disclose.  Output is sorted by ``article_id``.
    """
    counts: dict[str, int] = defaultdict(int)
    users: dict[str, set] = defaultdict(set)
    disclosers: dict[str, set] = defaultdict(set)
    for rec in records:
        counts[rec.article_id] += 1
        users[rec.article_id].add(rec.user_id)
        if rec.disclosed:
            disclosers[rec.article_id].add(rec.user_id)
    return [
        ArticleAggregate(aid, counts[aid], len(disclosers[aid]), tuple(sorted(users[aid])))
        for aid in sorted(counts)
    ]


def write_aggregates_csv(aggregates, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["article_id", "r", "s"])
        for a in aggregates:
            writer.writerow([a.article_id, a.R, a.S])


# --- synthetic data ------------------------------------------------------


def comment_total(A: float, gamma: float, s: int, eps: float = 0.0) -> int:
    """``round(A * s**gamma * exp(eps))``, the noisy common reward in comments."""
    return int(round(A * s**gamma * math.exp(eps)))


@dataclass
class SimulatedData:
    records: list[CommentRecord]
    x_true: dict[str, float]
    A: float
    gamma: float
    noise_sigma: float
    seed: int


def simulate_dataset(
    game: GameSpec,
    n_articles: int,
    noise_sigma: float = 0.0,
    seed: int = 0,
    *,
    n_users: int = 200,
    mean_users: float = 4.0,
    x_range: tuple[float, float] = (0.1, 0.5),
    activity_exponent: float = 1.0,
) -> SimulatedData:
    """Draw a comment table from the disclosure model.

    Only ``A`` and ``gamma`` of ``game`` are used.  Each user gets a
    disclosure probability uniform on ``x_range`` and an activity weight
    ``rank**-activity_exponent``.  An article draws ``1 + Poisson(mean_users - 1)``
    distinct participants by activity weight, each discloses with its own
    probability, and the comment total is ``round(A S**gamma exp(eps))``
    with ``eps ~ N(0, noise_sigma**2)``, raised if needed so that every
    participant has at least one comment.  Comments are spread over the
    participants; all comments of a disclosing participant carry the label.
    """
    if n_articles < 0:
        raise ValueError("n_articles must be non-negative")
    rng = np.random.default_rng(seed)
    user_ids = [f"u{i:05d}" for i in range(n_users)]
    x = rng.uniform(x_range[0], x_range[1], n_users)
    weights = np.arange(1, n_users + 1, dtype=float) ** -activity_exponent
    weights /= weights.sum()
    records: list[CommentRecord] = []
    for a in range(n_articles):
        aid = f"a{a:06d}"
        k = min(n_users, 1 + int(rng.poisson(max(mean_users - 1.0, 0.0))))
        who = rng.choice(n_users, size=k, replace=False, p=weights)
        who.sort()
        delta = rng.random(k) < x[who]
        s = int(delta.sum())
        eps = rng.normal(0.0, noise_sigma) if noise_sigma > 0 else 0.0
        total = max(comment_total(game.A, game.gamma, s, eps), k)
        extra = rng.multinomial(total - k, np.full(k, 1.0 / k))
        for idx, u in enumerate(who):
            for _ in range(1 + int(extra[idx])):
                records.append(CommentRecord(aid, user_ids[u], bool(delta[idx])))
    return SimulatedData(records, dict(zip(user_ids, x.tolist())), game.A, game.gamma, noise_sigma, seed)
