"""Answer-list scoring and evidence-ranking metrics.

Answers to a question over a document collection are *lists* of strings
whose order carries no meaning, and predictions rarely line up with the
ground truth one-to-one.  The list score here pairs predicted and gold
items with an optimal assignment over normalized Levenshtein similarity,
zeroes pairs below a threshold, and averages over the longer list so that
both missing and hallucinated items cost score.

Evidence retrieval is scored with average precision per question and the
mean over questions (reported as a percentage).

All functions are pure and deterministic; ranking ties resolve by doc id.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

if TYPE_CHECKING:
    from .dataset_io import GroundTruthEntry, Submission

__all__ = [
    "Assignment",
    "MetricReport",
    "QuestionScore",
    "RankedDoc",
    "anlsl",
    "average_precision",
    "evaluate",
    "hungarian_match",
    "levenshtein",
    "nls",
]

# Tiny bias added to raw similarities before matching: among assignments
# with equal raw totals, prefer the one keeping the most above-threshold
# mass.  Far below any genuine raw-total gap for answer-sized strings.
_TIE_EPS = 1e-7


def levenshtein(a: str, b: str) -> int:
    """Edit distance between two strings with unit costs.

    Insertions, deletions, and substitutions all cost 1.  Two-row dynamic
    program, O(len(a) * len(b)) time and O(min len) space.
    """
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


def nls(a: str, b: str, case_fold: bool = True) -> float:
    """Normalized Levenshtein similarity in [0, 1].

    1 - distance / max(len(a), len(b)); two empty strings score 1.0.
    Case folds both sides by default.
    """
    if case_fold:
        a, b = a.casefold(), b.casefold()
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


@dataclass(frozen=True)
class Assignment:
    """Optimal one-to-one pairing between the rows and columns of a score
    matrix.

    ``pairs`` holds (row, col, score) triples sorted by row, one per row
    or column of the shorter side.  In answer-list scoring rows are the
    ground-truth items and columns the predictions.
    """

    pairs: tuple[tuple[int, int, float], ...]

    @property
    def total(self) -> float:
        return sum(score for _, _, score in self.pairs)


def hungarian_match(scores) -> Assignment:
    """Maximum-total-score assignment between rows and columns.

    ``scores`` is a K x L matrix of finite reals.  Returns min(K, L)
    pairs.  Augmenting-path algorithm with potentials, O(n^2 m); scores
    are negated internally to reuse the minimization form, and the matrix
    is transposed when K > L so rows never outnumber columns.

    Raises ValueError on an empty or non-finite matrix.
    """
    matrix = np.asarray(scores, dtype=float)
    if matrix.ndim != 2 or matrix.size == 0:
        raise ValueError("score matrix must be 2-d and non-empty")
    if not np.isfinite(matrix).all():
        raise ValueError("score matrix must be finite")
    transposed = matrix.shape[0] > matrix.shape[1]
    work = matrix.T if transposed else matrix
    columns = _assign_min(-work)
    pairs = []
    for row, col in enumerate(columns):
        if transposed:
            pairs.append((col, row, float(matrix[col, row])))
        else:
            pairs.append((row, col, float(matrix[row, col])))
    pairs.sort()
    return Assignment(pairs=tuple(pairs))


def _assign_min(cost: np.ndarray) -> list[int]:
    # Potentials + augmenting paths over a (n <= m) cost matrix; 1-based
    # arrays with column 0 as the virtual start of each path.
    n, m = cost.shape
    inf = float("inf")
    u = [0.0] * (n + 1)
    v = [0.0] * (m + 1)
    match = [0] * (m + 1)
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [inf] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = inf
            j1 = 0
            for j in range(1, m + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    columns = [-1] * n
    for j in range(1, m + 1):
        if match[j]:
            columns[match[j] - 1] = j - 1
    return columns


def anlsl(
    gt: Sequence[str],
    pred: Sequence[str],
    threshold: float = 0.5,
    case_fold: bool = True,
) -> float:
    """Score a predicted answer list against a ground-truth list.

    Pairs items by a maximum-similarity assignment over pairwise NLS,
    zeroes matched pairs whose similarity falls below ``threshold``, and
    divides the kept total by max(len(gt), len(pred)).  Order of either
    list never matters.  Two empty lists score 1.0; one empty list scores
    0.0.  ``threshold=0`` keeps every matched pair's raw similarity.

    When several assignments tie on raw similarity total, the one keeping
    the most above-threshold mass wins, so the score is a well-defined
    function of its inputs.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    if not gt and not pred:
        return 1.0
    if not gt or not pred:
        return 0.0
    raw = np.array([[nls(g, p, case_fold=case_fold) for p in pred] for g in gt])
    kept = np.where(raw >= threshold, raw, 0.0)
    assignment = hungarian_match(raw + _TIE_EPS * kept)
    total = sum(kept[row, col] for row, col, _ in assignment.pairs)
    return total / max(len(gt), len(pred))


@dataclass(frozen=True)
class RankedDoc:
    """One document in a ranking, with a confidence in [0, 1]."""

    doc_id: str
    confidence: float

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        conf = float(self.confidence)
        if not np.isfinite(conf) or not 0.0 <= conf <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence!r}")
        object.__setattr__(self, "confidence", conf)


def average_precision(ranking: Sequence[RankedDoc], relevant: Iterable[str]) -> float:
    """Average precision of a ranking against a set of relevant doc ids.

    Documents sort by confidence descending with doc id ascending as the
    tie-break, so equal confidences never make the score run-dependent.
    Relevant documents absent from the ranking contribute zero: the sum
    of precisions divides by the number of relevant documents, not hits.

    Raises ValueError on an empty relevant set or duplicate doc ids.
    """
    relevant_ids = set(relevant)
    if not relevant_ids:
        raise ValueError("average precision is undefined for an empty relevant set")
    counts = Counter(doc.doc_id for doc in ranking)
    duplicates = sorted(doc_id for doc_id, n in counts.items() if n > 1)
    if duplicates:
        raise ValueError(f"duplicate doc ids in ranking: {duplicates}")
    ordered = sorted(ranking, key=lambda doc: (-doc.confidence, doc.doc_id))
    hits = 0
    total = 0.0
    for rank, doc in enumerate(ordered, start=1):
        if doc.doc_id in relevant_ids:
            hits += 1
            total += hits / rank
    return total / len(relevant_ids)


@dataclass(frozen=True)
class QuestionScore:
    """Per-question retrieval and answer scores."""

    question_id: str
    ap: float
    anlsl: float


@dataclass(frozen=True)
class MetricReport:
    """Collection-level evaluation: mean AP (as a percentage), mean answer
    list score, and the per-question breakdown sorted by question id."""

    map_percent: float
    anlsl: float
    per_question: tuple[QuestionScore, ...]

    def to_dict(self) -> dict:
        return {
            "map_percent": self.map_percent,
            "anlsl": self.anlsl,
            "per_question": [
                {"question_id": q.question_id, "ap": q.ap, "anlsl": q.anlsl}
                for q in self.per_question
            ],
        }


def evaluate(
    submissions: Iterable["Submission"],
    gt_entries: Iterable["GroundTruthEntry"],
    threshold: float = 0.5,
    case_fold: bool = True,
) -> MetricReport:
    """Score submissions against ground truth, question by question.

    Submission and ground-truth question ids must match exactly; missing,
    unknown, and duplicate ids are all reported in one error.  MAP is the
    mean AP times 100; the answer score is the plain mean over questions.
    """
    from .errors import ValidationError

    subs = list(submissions)
    entries = list(gt_entries)
    if not entries:
        raise ValidationError("no ground truth entries to evaluate against")
    problems = []
    for label, ids in (("submission", [s.question_id for s in subs]),
                       ("ground truth", [e.question_id for e in entries])):
        duplicates = sorted(q for q, n in Counter(ids).items() if n > 1)
        if duplicates:
            problems.append(f"duplicate {label} question ids: {duplicates}")
    sub_ids = {s.question_id for s in subs}
    gt_ids = {e.question_id for e in entries}
    missing = sorted(gt_ids - sub_ids)
    unknown = sorted(sub_ids - gt_ids)
    if missing:
        problems.append(f"missing submissions for question ids: {missing}")
    if unknown:
        problems.append(f"submissions for unknown question ids: {unknown}")
    if problems:
        raise ValidationError("; ".join(problems))

    by_id = {s.question_id: s for s in subs}
    rows = []
    for entry in sorted(entries, key=lambda e: e.question_id):
        submission = by_id[entry.question_id]
        rows.append(QuestionScore(
            question_id=entry.question_id,
            ap=average_precision(submission.ranking, entry.relevant_doc_ids),
            anlsl=anlsl(entry.answers, submission.answers, threshold, case_fold),
        ))
    n = len(rows)
    return MetricReport(
        map_percent=100.0 * sum(r.ap for r in rows) / n,
        anlsl=sum(r.anlsl for r in rows) / n,
        per_question=tuple(rows),
    )
