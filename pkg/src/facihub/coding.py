"""LLM-backed presence coding of forum records against the closed
14-indicator vocabulary. Invalid codes reject the record (raw output kept);
empty-text records are coded as all-absent without a client call."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Sequence

from .clients import CompletionClient
from .errors import UnparseableOutputError
from .presence import INDICATORS, SALIENCE_VALUES, CodedUnit, load_coding_scheme
from .records import ActionRecord

MAX_PARSE_RETRIES = 2

_FORMAT_REMINDER = ('\n\nReminder: output only lines of the form "CODE primary" or '
                    '"CODE secondary", or the single line "none".')


@dataclass(frozen=True)
class CodingRejection:
    record_id: str
    reason: str
    raw_output: str


def _indicator_block() -> str:
    scheme = load_coding_scheme()
    lines = []
    for entry in scheme["indicators"]:
        lines.append(f"{entry['code']} ({entry['name']}): {entry['description']}")
    return "\n".join(lines)


def build_coding_prompt(text: str) -> str:
    template = resources.files("facihub.fixtures").joinpath("coding_prompt.txt").read_text("utf-8")
    return template.format(indicators=_indicator_block(), text=text)


def parse_coding_output(record_id: str, raw: str) -> list[CodedUnit]:
    """Parse "CODE salience" lines; raises ValueError on any invalid line."""
    lines = [line.strip() for line in raw.strip().splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty coding output")
    if len(lines) == 1 and lines[0].lower() == "none":
        return []
    units = []
    for line in lines:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"unparseable coding line {line!r}")
        code, salience = parts[0].upper(), parts[1].lower()
        if code not in INDICATORS:
            raise ValueError(f"unknown indicator code {code!r}")
        if salience not in SALIENCE_VALUES:
            raise ValueError(f"unknown salience {salience!r}")
        units.append(CodedUnit(record_id=record_id, indicator=code, salience=salience))
    return units


def llm_code_records(records: Sequence[ActionRecord], client: CompletionClient,
                     model_name: str, temperature: float = 0.7,
                     ) -> tuple[list[CodedUnit], list[CodingRejection]]:
    """Code each record's text; per-record rejection on persistent invalid
    output, transport errors propagate."""
    units: list[CodedUnit] = []
    rejections: list[CodingRejection] = []
    system_prompt = "You code forum records with a fixed indicator scheme."
    for rec in records:
        text = (rec.text or "").strip()
        if not text:
            continue  # no units; all indicators absent
        prompt = build_coding_prompt(text)
        raw = ""
        parsed = None
        reason = ""
        messages = [prompt]
        for _ in range(1 + MAX_PARSE_RETRIES):
            raw = client.complete(system_prompt, messages, model_name, temperature)
            try:
                parsed = parse_coding_output(rec.record_id, raw)
                break
            except ValueError as exc:
                reason = str(exc)
                messages = [prompt + _FORMAT_REMINDER]
        if parsed is None:
            rejections.append(CodingRejection(record_id=rec.record_id,
                                              reason=reason, raw_output=raw))
        else:
            units.extend(parsed)
    return units, rejections


def raise_if_all_rejected(units: list[CodedUnit],
                          rejections: list[CodingRejection]) -> None:
    if rejections and not units:
        sample = rejections[0]
        raise UnparseableOutputError(
            f"coder produced no valid output ({len(rejections)} rejections; "
            f"first: {sample.reason})", raw_output=sample.raw_output)
