"""Session gateway: wire protocol plus the cockpit-facing server."""

from bridgesim.gateway.protocol import (
    CLIENT_KINDS,
    PROTOCOL_VERSION,
    SERVER_KINDS,
    MessageKind,
    ProtocolError,
    SequenceChecker,
    SequenceCounter,
    WireMessage,
    control_from_payload,
    control_payload,
    decode_message,
    encode_message,
    feedback_payload,
    frame_payload,
    hello_payload,
    hud_payload,
    scenario_summary_payload,
    session_end_payload,
)
from bridgesim.gateway.server import (
    ADDRESS_ENV,
    DEFAULT_ADDRESS,
    GatewayConfig,
    GatewayServer,
    resolve_address,
    serve,
)

__all__ = [
    "ADDRESS_ENV",
    "CLIENT_KINDS",
    "DEFAULT_ADDRESS",
    "GatewayConfig",
    "GatewayServer",
    "MessageKind",
    "PROTOCOL_VERSION",
    "ProtocolError",
    "SERVER_KINDS",
    "SequenceChecker",
    "SequenceCounter",
    "WireMessage",
    "control_from_payload",
    "control_payload",
    "decode_message",
    "encode_message",
    "feedback_payload",
    "frame_payload",
    "hello_payload",
    "hud_payload",
    "resolve_address",
    "scenario_summary_payload",
    "serve",
    "session_end_payload",
]
