"""Layer 1 transport and the semantic bus: frames, broker, agents, scenarios, corpus."""

from .agents import AgentKind, AgentProfile, AIAgent, HumanAgent, RobotAgent, SimAgent, TwinAgent, make_agent
from .broker import RESOLVER_ID, Broker, Delivery, DeliveryReport, payload_digest
from .corpus import CorpusRecord, corpus_text, export_corpus, import_corpus, validate_corpus
from .frame import (
    HEADER_SIZE,
    MAGIC,
    MAX_PAYLOAD,
    NEED_MORE,
    VERSION,
    Frame,
    FrameDecoder,
    MsgType,
    decode_frame,
    encode_frame,
    split_frame,
)
from .scenario import (
    ExpectationResult,
    ScenarioResult,
    ScenarioScript,
    check_expectation,
    load_scenario,
    run_scenario,
    scenario_from_dict,
)
from .server import BrokerServer, parse_addr, send_request

__all__ = [
    "AgentKind", "AgentProfile", "AIAgent", "HumanAgent", "RobotAgent", "SimAgent", "TwinAgent", "make_agent",
    "RESOLVER_ID", "Broker", "Delivery", "DeliveryReport", "payload_digest",
    "CorpusRecord", "corpus_text", "export_corpus", "import_corpus", "validate_corpus",
    "HEADER_SIZE", "MAGIC", "MAX_PAYLOAD", "NEED_MORE", "VERSION", "Frame", "FrameDecoder", "MsgType",
    "decode_frame", "encode_frame", "split_frame",
    "ExpectationResult", "ScenarioResult", "ScenarioScript", "check_expectation", "load_scenario",
    "run_scenario", "scenario_from_dict",
    "BrokerServer", "parse_addr", "send_request",
]
