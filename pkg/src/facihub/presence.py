"""Discourse-presence coding model: the 14-indicator scheme, record scoring,
category/total aggregation, learner-level means, interaction-mode
classification, and inter-coder agreement.

Indicator values are primary=1.0, secondary=0.5, absent=0.0 with duplicate
codes resolved by max salience. Category scores sum the two indicators of
each category; SP_total and CP_total sum their categories exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Sequence

from .errors import EngineError
from .records import ActionRecord, EventStore

SOCIAL_CATEGORIES = ("AF", "OC", "NC")
COGNITIVE_CATEGORIES = ("PT", "EX", "IN", "RC")
CATEGORIES = SOCIAL_CATEGORIES + COGNITIVE_CATEGORIES

INDICATORS = tuple(f"{cat}{i}" for cat in CATEGORIES for i in (1, 2))
_INDICATOR_SET = frozenset(INDICATORS)

INDEX_ORDER = ("SP_AF", "SP_OC", "SP_NC", "SP_total",
               "CP_PT", "CP_EX", "CP_IN", "CP_RC", "CP_total")

SALIENCE_VALUES = {"primary": 1.0, "secondary": 0.5}


def validate_indicator(code: str) -> str:
    if code not in _INDICATOR_SET:
        raise ValueError(f"unknown indicator code {code!r}; valid codes: {INDICATORS}")
    return code


@dataclass(frozen=True)
class CodedUnit:
    record_id: str
    indicator: str
    salience: str  # primary | secondary

    def __post_init__(self):
        validate_indicator(self.indicator)
        if self.salience not in SALIENCE_VALUES:
            raise ValueError(f"salience must be primary or secondary, got {self.salience!r}")


@dataclass(frozen=True)
class PresenceIndexVector:
    SP_AF: float
    SP_OC: float
    SP_NC: float
    SP_total: float
    CP_PT: float
    CP_EX: float
    CP_IN: float
    CP_RC: float
    CP_total: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in INDEX_ORDER}

    def __getitem__(self, name: str) -> float:
        if name not in INDEX_ORDER:
            raise KeyError(name)
        return getattr(self, name)


def score_record(units: Sequence[CodedUnit]) -> dict[str, float]:
    """Per-indicator values for one record: 1.0 if any primary unit, else
    0.5 if any secondary, else 0.0."""
    record_ids = {u.record_id for u in units}
    if len(record_ids) > 1:
        raise ValueError(f"units span multiple records: {sorted(record_ids)}")
    values = {code: 0.0 for code in INDICATORS}
    for unit in units:
        values[unit.indicator] = max(values[unit.indicator],
                                     SALIENCE_VALUES[unit.salience])
    return values


def aggregate_indices(values: Mapping[str, float]) -> PresenceIndexVector:
    """Seven category sums and the two presence totals."""
    unknown = set(values) - _INDICATOR_SET
    if unknown:
        raise ValueError(f"unknown indicator codes: {sorted(unknown)}")
    cat = {c: values.get(f"{c}1", 0.0) + values.get(f"{c}2", 0.0) for c in CATEGORIES}
    sp_total = sum(cat[c] for c in SOCIAL_CATEGORIES)
    cp_total = sum(cat[c] for c in COGNITIVE_CATEGORIES)
    return PresenceIndexVector(
        SP_AF=cat["AF"], SP_OC=cat["OC"], SP_NC=cat["NC"], SP_total=sp_total,
        CP_PT=cat["PT"], CP_EX=cat["EX"], CP_IN=cat["IN"], CP_RC=cat["RC"],
        CP_total=cp_total)


def index_vector_for_units(units: Sequence[CodedUnit]) -> PresenceIndexVector:
    return aggregate_indices(score_record(units))


def learner_level_means(
    scores: Iterable[tuple[str, str, PresenceIndexVector]],
) -> dict[tuple[str, str], PresenceIndexVector]:
    """Arithmetic mean of each index over a learner's records per condition."""
    sums: dict[tuple[str, str], dict[str, float]] = {}
    counts: dict[tuple[str, str], int] = {}
    for learner_id, condition, vector in scores:
        key = (learner_id, condition)
        acc = sums.setdefault(key, {name: 0.0 for name in INDEX_ORDER})
        for name in INDEX_ORDER:
            acc[name] += vector[name]
        counts[key] = counts.get(key, 0) + 1
    out: dict[tuple[str, str], PresenceIndexVector] = {}
    for key, acc in sums.items():
        n = counts[key]
        out[key] = PresenceIndexVector(**{name: acc[name] / n for name in INDEX_ORDER})
    return out


# -- interaction modes --------------------------------------------------------


@dataclass(frozen=True)
class InteractionMode:
    learner_id: str
    mode: str  # direct | co_presence
    evidence: list[str]


def _parent_author(store: EventStore, rec: ActionRecord) -> str | None:
    """Author of the artifact a record responds to (post for comments,
    parent reply or top-level comment for replies)."""
    if rec.action_type == "commented":
        return store.artifact_author(rec.post_id)
    if rec.action_type == "replied":
        return store.reply_parent_author(rec)
    return None


def classify_interaction_modes(store: EventStore, published_post_ids: set[str],
                               pca_user_id: str) -> list[InteractionMode]:
    """Classify every learner active in a published-reply thread.

    direct: the learner exchanged a comment/reply with the agent (either
    direction) somewhere in those threads; co_presence: participated with
    no such tie. Learners never active in an involved thread are excluded.
    """
    active: dict[str, list[str]] = {}
    ties: dict[str, list[str]] = {}
    for rec in store:
        if rec.post_id not in published_post_ids:
            continue
        if rec.actor_id != pca_user_id:
            active.setdefault(rec.actor_id, [])
        if rec.action_type not in ("commented", "replied"):
            continue
        parent = _parent_author(store, rec)
        if rec.actor_id == pca_user_id and parent is not None and parent != pca_user_id:
            ties.setdefault(parent, []).append(rec.record_id)
        elif rec.actor_id != pca_user_id and parent == pca_user_id:
            ties.setdefault(rec.actor_id, []).append(rec.record_id)
    out = []
    for learner_id in sorted(active):
        evidence = ties.get(learner_id, [])
        mode = "direct" if evidence else "co_presence"
        out.append(InteractionMode(learner_id=learner_id, mode=mode,
                                   evidence=sorted(evidence)))
    return out


# -- inter-coder agreement ----------------------------------------------------


@dataclass(frozen=True)
class KappaResult:
    value: float | None  # None when p_e == 1 (degenerate)
    p_observed: float
    p_expected: float
    n_records: int

    @property
    def degenerate(self) -> bool:
        return self.value is None


def _presence_set(units: Iterable[CodedUnit | str]) -> set[str]:
    codes = set()
    for u in units:
        code = u if isinstance(u, str) else u.indicator
        codes.add(validate_indicator(code))
    return codes


def cohens_kappa(codes_a: Mapping[str, Iterable[CodedUnit | str]],
                 codes_b: Mapping[str, Iterable[CodedUnit | str]],
                 indicator: str) -> KappaResult:
    """Binary presence/absence agreement on one indicator.

    `codes_a` / `codes_b` map record_id to that coder's units (or bare
    indicator codes) for the record; the key sets define coverage and must
    match. kappa = (p_o - p_e) / (1 - p_e); when both coders are constant
    and identical (p_e = 1) the result is degenerate and carries p_o only.
    """
    validate_indicator(indicator)
    if set(codes_a) != set(codes_b):
        only_a = sorted(set(codes_a) - set(codes_b))[:3]
        only_b = sorted(set(codes_b) - set(codes_a))[:3]
        raise ValueError(f"coders cover different record sets "
                         f"(only in a: {only_a}, only in b: {only_b})")
    n = len(codes_a)
    if n == 0:
        raise ValueError("empty record set")
    both = a_only = b_only = neither = 0
    for record_id in codes_a:
        in_a = indicator in _presence_set(codes_a[record_id])
        in_b = indicator in _presence_set(codes_b[record_id])
        if in_a and in_b:
            both += 1
        elif in_a:
            a_only += 1
        elif in_b:
            b_only += 1
        else:
            neither += 1
    p_o = (both + neither) / n
    a_yes = (both + a_only) / n
    b_yes = (both + b_only) / n
    p_e = a_yes * b_yes + (1 - a_yes) * (1 - b_yes)
    if p_e == 1.0:
        return KappaResult(value=None, p_observed=p_o, p_expected=p_e, n_records=n)
    kappa = (p_o - p_e) / (1 - p_e)
    return KappaResult(value=kappa, p_observed=p_o, p_expected=p_e, n_records=n)


# -- file formats ---------------------------------------------------------------


def read_coding_ndjson(path) -> dict[str, dict[str, list[CodedUnit]]]:
    """Read a coding file (one JSON object per line with record_id,
    indicator, salience, coder_id) into per-coder record->units mappings,
    e.g. for gold-set agreement evaluation."""
    from pathlib import Path

    sheets: dict[str, dict[str, list[CodedUnit]]] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            raw = json.loads(line)
            try:
                unit = CodedUnit(record_id=raw["record_id"],
                                 indicator=raw["indicator"],
                                 salience=raw["salience"])
                coder = raw["coder_id"]
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            sheets.setdefault(coder, {}).setdefault(unit.record_id, []).append(unit)
    return sheets


def index_export_tsv(means: Mapping[tuple[str, str], PresenceIndexVector]) -> str:
    """Tabular export of index vectors keyed by (learner_id, condition)."""
    lines = ["learner_id\tcondition\t" + "\t".join(INDEX_ORDER)]
    for (learner_id, condition) in sorted(means):
        vector = means[(learner_id, condition)]
        values = "\t".join(f"{vector[name]:.6g}" for name in INDEX_ORDER)
        lines.append(f"{learner_id}\t{condition}\t{values}")
    return "\n".join(lines) + "\n"


# -- coding scheme fixture ----------------------------------------------------


def load_coding_scheme() -> dict:
    """Indicator names and descriptions consumed by the coding prompts."""
    text = resources.files("facihub.fixtures").joinpath("coding_scheme.json").read_text("utf-8")
    scheme = json.loads(text)
    codes = {entry["code"] for entry in scheme["indicators"]}
    if codes != set(INDICATORS):
        raise EngineError("coding scheme fixture does not cover the 14 indicators")
    return scheme
