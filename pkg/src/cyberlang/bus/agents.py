"""Simulated heterogeneous recipients on the bus."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

from ..compiler.targets import CompiledForm, TargetProfile, decompile_machine_json
from ..core.values import Reference


class AgentKind(str, Enum):
    HUMAN = "human"
    AI = "ai"
    ROBOT = "robot"
    TWIN = "twin"

    @property
    def target(self) -> TargetProfile:
        return _TARGETS[self]


_TARGETS = {
    AgentKind.HUMAN: TargetProfile.HUMAN_NL,
    AgentKind.AI: TargetProfile.MACHINE_JSON,
    AgentKind.ROBOT: TargetProfile.ROBOT_CMD,
    AgentKind.TWIN: TargetProfile.TWIN_UPDATE,
}


@dataclass(frozen=True)
class AgentProfile:
    agent_id: str
    kind: AgentKind
    dialect: Optional[str] = None
    # what this agent means by an ambiguous lambda when it speaks
    intents: Mapping[str, Reference] = field(default_factory=dict)

    def __post_init__(self):
        if not self.agent_id:
            raise ValueError("agent id must be non-empty")
        object.__setattr__(self, "kind", AgentKind(self.kind))
        object.__setattr__(self, "intents", {k: v if isinstance(v, Reference) else Reference(v)
                                             for k, v in self.intents.items()})

    @property
    def target(self) -> TargetProfile:
        return self.kind.target


class SimAgent:
    """Keeps every delivery; subclasses add the kind-specific reaction."""

    def __init__(self, profile: AgentProfile):
        self.profile = profile
        self.inbox: list[CompiledForm] = []

    @property
    def agent_id(self) -> str:
        return self.profile.agent_id

    def receive(self, form: CompiledForm) -> None:
        self.inbox.append(form)
        self.react(form)

    def react(self, form: CompiledForm) -> None:
        pass


class HumanAgent(SimAgent):
    def __init__(self, profile):
        super().__init__(profile)
        self.read: list[str] = []

    def react(self, form):
        self.read.append(form.payload)


class AIAgent(SimAgent):
    """Parses the interlingua back into statements."""

    def __init__(self, profile):
        super().__init__(profile)
        self.statements = []

    def react(self, form):
        self.statements.append(decompile_machine_json(form.payload, ids=lambda: form.source_statement_id))


class RobotAgent(SimAgent):
    def __init__(self, profile):
        super().__init__(profile)
        self.executed: list[tuple[str, dict]] = []

    def react(self, form):
        for item in form.payload:
            self.executed.append((item["cmd"], dict(item["args"])))


class TwinAgent(SimAgent):
    """Mirror state keyed by twin path."""

    def __init__(self, profile):
        super().__init__(profile)
        self.state: dict[str, str] = {}

    def react(self, form):
        for item in form.payload:
            self.state[item["path"]] = item["value"]


AGENT_CLASSES = {
    AgentKind.HUMAN: HumanAgent,
    AgentKind.AI: AIAgent,
    AgentKind.ROBOT: RobotAgent,
    AgentKind.TWIN: TwinAgent,
}


def make_agent(profile: AgentProfile) -> SimAgent:
    return AGENT_CLASSES[profile.kind](profile)
