"""Role-conditioned reply generation: persona + role-framework prompt
assembly and structured-output parsing with bounded retries.

The model must answer with two labeled fields::

    reply_role: <role name>
    reply_text: <reply body, may span lines>

Parse failures are retried up to 2 times with a format reminder appended;
a role outside the enabled set is a violation, never remapped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime
from importlib import resources
from typing import Sequence

from .clients import CompletionClient
from .errors import RoleViolationError, UnparseableOutputError
from .records import ThreadContext

ROLE_NAMES = ("Guide", "Amplifier", "Empathizer", "Critical_Inquirer")
ITERATION2_ROLES = ("Guide", "Amplifier")

MAX_PARSE_RETRIES = 2

_FORMAT_REMINDER = ("\n\nReminder: answer with exactly two labeled fields and "
                    "nothing else:\nreply_role: <role>\nreply_text: <reply>")


def _fixture(name: str) -> str:
    return resources.files("facihub.fixtures").joinpath(name).read_text("utf-8")


@dataclass(frozen=True)
class RoleSpec:
    name: str
    trigger_characteristics: str
    response_objectives: str
    language_style: str


@dataclass(frozen=True)
class RoleFramework:
    roles: list[RoleSpec]
    enabled: tuple[str, ...]

    def __post_init__(self):
        declared = {r.name for r in self.roles}
        unknown = set(self.enabled) - declared
        if unknown:
            raise ValueError(f"enabled roles not declared: {sorted(unknown)}")

    def enabled_specs(self) -> list[RoleSpec]:
        return [r for r in self.roles if r.name in self.enabled]

    @staticmethod
    def _load_specs() -> list[RoleSpec]:
        import json

        raw = json.loads(_fixture("role_framework.json"))
        return [RoleSpec(**entry) for entry in raw["roles"]]

    @classmethod
    def full(cls) -> "RoleFramework":
        """All four roles enabled (initial deployment profile)."""
        return cls(roles=cls._load_specs(), enabled=ROLE_NAMES)

    @classmethod
    def guide_amplifier(cls) -> "RoleFramework":
        """Refined profile: only Guide and Amplifier stay active."""
        return cls(roles=cls._load_specs(), enabled=ITERATION2_ROLES)


@dataclass(frozen=True)
class GenerationParams:
    model_name: str
    temperature: float = 0.6


@dataclass(frozen=True)
class PromptBundle:
    system_prompt: str
    role_guidance: str
    user_prompt: str
    generation_params: GenerationParams
    target_id: str
    target_kind: str


def _framework_block(specs: Sequence[RoleSpec]) -> str:
    lines = []
    for spec in specs:
        lines.append(f"- {spec.name}:")
        lines.append(f"    Characteristics of the target comment: {spec.trigger_characteristics}")
        lines.append(f"    Response objectives: {spec.response_objectives}")
        lines.append(f"    Language style: {spec.language_style}")
    return "\n".join(lines)


def assemble_prompt(target_id: str, ctx: ThreadContext, fw: RoleFramework,
                    params: GenerationParams) -> PromptBundle:
    """Build the persona/role/context prompt bundle for one target.

    Post targets use the post template (title + content); comment and reply
    targets use the comment template, including the upstream thread section
    only when the target has ancestors above its top-level comment.
    """
    if ctx.target_id != target_id:
        raise ValueError(f"thread context resolves {ctx.target_id!r}, "
                         f"but the target is {target_id!r}")
    specs = fw.enabled_specs()
    guidance = _fixture("role_guidance.txt").format(
        framework=_framework_block(specs),
        enabled_roles=", ".join(s.name for s in specs))
    if ctx.target_kind == "post":
        user_prompt = _fixture("post_template.txt").format(
            title=ctx.post.title, content=ctx.post.content)
    else:
        target = ctx.comment_chain[-1]
        upstream = ctx.comment_chain[:-1]
        if upstream:
            thread = "\n".join(f"[{e.author_id}] {e.text}" for e in upstream)
            thread_section = f"Upstream comment thread:\n{thread}"
        else:
            thread_section = ""
        user_prompt = _fixture("comment_template.txt").format(
            title=ctx.post.title, content=ctx.post.content,
            comment=target.text, thread_section=thread_section).rstrip("\n") + "\n"
    return PromptBundle(system_prompt=_fixture("persona.txt"),
                        role_guidance=guidance,
                        user_prompt=user_prompt,
                        generation_params=params,
                        target_id=target_id,
                        target_kind=ctx.target_kind)


@dataclass(frozen=True)
class CandidateResponse:
    candidate_id: str
    target_id: str
    role: str
    text: str
    generated_at: datetime
    raw_output: str
    status: str = "pending"  # pending | accepted | rejected


_ROLE_RE = re.compile(r"^\s*reply_role\s*[:：]\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE)
_TEXT_RE = re.compile(r"^\s*reply_text\s*[:：]\s*(.*)$", re.IGNORECASE | re.MULTILINE | re.DOTALL)


def parse_structured_reply(raw: str) -> tuple[str, str]:
    """Extract (role, text) from a structured reply; ValueError on failure."""
    role_match = _ROLE_RE.search(raw)
    text_match = _TEXT_RE.search(raw)
    if role_match is None or text_match is None:
        raise ValueError("output lacks reply_role/reply_text fields")
    text = text_match.group(1).strip()
    if not text:
        raise ValueError("reply_text is empty")
    return role_match.group(1).strip(), text


def _normalize_role(raw_role: str) -> str:
    return raw_role.strip().replace(" ", "_").lower()


def generate_candidate(bundle: PromptBundle, client: CompletionClient,
                       fw: RoleFramework, candidate_id: str,
                       generated_at: datetime) -> CandidateResponse:
    """Invoke the client and validate the structured reply.

    Up to 2 retries with a format reminder on parse failure; a parsed role
    outside the enabled set raises RoleViolationError. Transport errors
    propagate from the client (retryable by the caller).
    """
    enabled_by_norm = {_normalize_role(name): name for name in fw.enabled}
    messages = [bundle.role_guidance, bundle.user_prompt]
    raw = ""
    for attempt in range(1 + MAX_PARSE_RETRIES):
        raw = client.complete(bundle.system_prompt, messages,
                              bundle.generation_params.model_name,
                              bundle.generation_params.temperature)
        try:
            raw_role, text = parse_structured_reply(raw)
        except ValueError:
            messages = [bundle.role_guidance, bundle.user_prompt + _FORMAT_REMINDER]
            continue
        role = enabled_by_norm.get(_normalize_role(raw_role))
        if role is None:
            raise RoleViolationError(
                f"model selected role {raw_role!r}, outside the enabled set "
                f"{sorted(fw.enabled)}", role=raw_role, raw_output=raw)
        return CandidateResponse(candidate_id=candidate_id,
                                 target_id=bundle.target_id,
                                 role=role, text=text,
                                 generated_at=generated_at,
                                 raw_output=raw)
    raise UnparseableOutputError(
        f"no parseable reply after {1 + MAX_PARSE_RETRIES} attempts", raw_output=raw)
