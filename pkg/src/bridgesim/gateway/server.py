"""Cockpit session server: drives one interactive session per connection.

The connection handler and the simulation loop are separate tasks that
talk through two bounded single-producer single-consumer channels.  The
simulation is never delayed by a slow client: the outgoing state channel
drops its oldest entries on overflow, and all socket awaits happen in
the sender task.
"""

from __future__ import annotations

import asyncio
import os
import time
from collections import deque
from dataclasses import dataclass

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from bridgesim.assessment import (
    QuestionnaireError,
    QuestionnaireResponse,
    emit_report,
    questionnaire_ingest,
    write_report,
)
from bridgesim.dynamics import ControlInput
from bridgesim.gateway import protocol as wire
from bridgesim.scenario import ScenarioSpec
from bridgesim.session import (
    SessionConfig,
    SessionLoop,
    SessionMode,
    SessionOutcome,
    new_session_dir,
    record_repetition,
)

ADDRESS_ENV = "BRIDGESIM_ADDRESS"
DEFAULT_ADDRESS = "127.0.0.1:8765"

# How long a session keeps flying on zeroed input after the cockpit
# drops, before it is aborted.
DISCONNECT_GRACE_S = 5.0

# How long the connection stays open after report_ready waiting for a
# questionnaire submission.
QUESTIONNAIRE_WAIT_S = 600.0

CONTROL_CHANNEL_CAPACITY = 256
STATE_CHANNEL_CAPACITY = 128


def resolve_address(value: str | None = None) -> tuple[str, int]:
    """CLI value wins, then the environment variable, then the default."""
    raw = value or os.environ.get(ADDRESS_ENV) or DEFAULT_ADDRESS
    host, sep, port = raw.rpartition(":")
    if not sep or not host:
        raise ValueError(f"address must look like host:port, got {raw!r}")
    try:
        return host, int(port)
    except ValueError:
        raise ValueError(f"invalid port in address {raw!r}") from None


class BoundedChannel:
    """Single-producer single-consumer queue that drops oldest on overflow."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.dropped = 0
        self._items: deque = deque()
        self._ready = asyncio.Event()

    def put(self, item) -> None:
        if len(self._items) >= self.capacity:
            self._items.popleft()
            self.dropped += 1
        self._items.append(item)
        self._ready.set()

    def take_all(self) -> list:
        items = list(self._items)
        self._items.clear()
        self._ready.clear()
        return items

    async def wait(self) -> None:
        await self._ready.wait()


@dataclass(frozen=True)
class GatewayConfig:
    scenario: ScenarioSpec
    participant_id: str = "anonymous"
    seed: int = 0
    log_dir: str | None = None
    practice: bool = False
    decimation: int = 2  # send every Nth frame to the cockpit
    realtime: bool = True  # False: run as fast as the event loop allows


class GatewaySession:
    """One cockpit connection driving one simulated session."""

    def __init__(self, config: GatewayConfig, websocket):
        self.config = config
        self.websocket = websocket
        self.clamp_warnings = 0
        self.disconnect_frame: int | None = None
        self.outcome: SessionOutcome | None = None
        self.report: dict | None = None
        self.report_path: str | None = None
        self.questionnaire: QuestionnaireResponse | None = None
        self._controls = BoundedChannel(CONTROL_CHANNEL_CAPACITY)
        self._outgoing = BoundedChannel(STATE_CHANNEL_CAPACITY)
        self._out_seq = wire.SequenceCounter()
        self._in_check = wire.SequenceChecker()
        self._disconnected = False
        self._last_axes = ControlInput()
        self._pending_light = False
        self._pending_snapshot = False
        self._session_dir: str | None = None
        log_path = None
        if config.log_dir is not None:
            self._session_dir = new_session_dir(
                config.log_dir, config.participant_id, config.practice
            )
            log_path = os.path.join(self._session_dir, "session.jsonl")
        repetition = 1
        if self._session_dir is not None:
            tail = os.path.basename(self._session_dir)
            repetition = int(tail.rsplit("_", 1)[1])
        self.loop = SessionLoop(
            SessionConfig(
                scenario=config.scenario,
                mode=SessionMode.INTERACTIVE,
                seed=config.seed,
                participant_id=config.participant_id,
                repetition=repetition,
                practice=config.practice,
                log_path=log_path,
            )
        )

    # -- outgoing ----------------------------------------------------------

    def _queue(self, kind: wire.MessageKind, payload: dict) -> None:
        message = wire.WireMessage(kind=kind, seq=self._out_seq.take(), payload=payload)
        self._outgoing.put(wire.encode_message(message))

    async def _send_loop(self) -> None:
        try:
            while True:
                await self._outgoing.wait()
                for line in self._outgoing.take_all():
                    await self.websocket.send(line)
        except (ConnectionClosed, OSError):
            self._mark_disconnected()

    # -- incoming ----------------------------------------------------------

    def _mark_disconnected(self) -> None:
        if not self._disconnected:
            self._disconnected = True
            if self.loop.started and not self.loop.ended:
                self.disconnect_frame = self.loop.frame_index

    async def _recv_loop(self) -> None:
        try:
            async for raw in self.websocket:
                message = wire.decode_message(raw)
                wire.check_direction(message, from_client=True)
                self._in_check.accept(message.seq)
                if message.kind is wire.MessageKind.CONTROL:
                    control, needed_clamp = wire.control_from_payload(message.payload)
                    if needed_clamp:
                        self.clamp_warnings += 1
                    self._controls.put(control.clamped())
                elif message.kind is wire.MessageKind.QUESTIONNAIRE:
                    self._handle_questionnaire(message.payload)
                else:
                    raise wire.ProtocolError("unexpected hello after handshake")
        except wire.ProtocolError as exc:
            await self._send_error("protocol", str(exc), close_code=1002)
        except (ConnectionClosed, OSError):
            pass
        finally:
            self._mark_disconnected()

    def _handle_questionnaire(self, payload: dict) -> None:
        try:
            response = questionnaire_ingest(payload)
        except QuestionnaireError as exc:
            self._queue(
                wire.MessageKind.ERROR, wire.error_payload("questionnaire", str(exc))
            )
            return
        self.questionnaire = response
        if self.outcome is not None:
            self._publish_report()

    # -- simulation --------------------------------------------------------

    def _sample_control(self) -> ControlInput:
        """Latest-value-wins for the axes; light/snapshot fire exactly once."""
        for control in self._controls.take_all():
            self._last_axes = control
            self._pending_light = self._pending_light or control.light
            self._pending_snapshot = self._pending_snapshot or control.snapshot
        if self._disconnected:
            self._pending_light = False
            self._pending_snapshot = False
            return ControlInput()
        sampled = ControlInput(
            forward=self._last_axes.forward,
            right=self._last_axes.right,
            up=self._last_axes.up,
            rotate=self._last_axes.rotate,
            light=self._pending_light,
            snapshot=self._pending_snapshot,
        )
        self._pending_light = False
        self._pending_snapshot = False
        return sampled

    def _emit_tick(self, tick) -> None:
        loop = self.loop
        if tick.new_messages:
            self._queue(wire.MessageKind.FEEDBACK, wire.feedback_payload(tick))
        if loop.frame_index % self.config.decimation == 0:
            sim_time = (loop.frame_index + 1) * loop.dt
            self._queue(
                wire.MessageKind.FRAME,
                wire.frame_payload(
                    loop.frame_index, sim_time, loop.state, tick, loop.traffic
                ),
            )
            self._queue(wire.MessageKind.HUD, wire.hud_payload(tick.hud))

    async def _sim_loop(self) -> None:
        loop = self.loop
        grace_frames = round(DISCONNECT_GRACE_S * loop.job.frame_rate_hz)
        ticks_since_disconnect = 0
        deadline = time.perf_counter() + loop.dt
        while not loop.ended:
            control = self._sample_control()
            if not loop.started:
                if self._disconnected or loop.pre_takeoff_exhausted:
                    loop.abort()
                    break
                loop.offer_pre_takeoff(control)
                if loop.started:
                    self._emit_tick(loop.tick(control))
            else:
                self._emit_tick(loop.tick(control))
                if self._disconnected:
                    ticks_since_disconnect += 1
                    if ticks_since_disconnect >= grace_frames:
                        loop.abort()
                        break
            if self.config.realtime:
                delay = deadline - time.perf_counter()
                deadline += loop.dt
                if delay > 0:
                    await asyncio.sleep(delay)
                else:
                    await asyncio.sleep(0)
            else:
                await asyncio.sleep(0)

    # -- lifecycle ---------------------------------------------------------

    def _publish_report(self) -> None:
        outcome = self.outcome
        assert outcome is not None
        session_meta = {
            "participant": self.config.participant_id,
            "repetition": self.loop.config.repetition,
            "end_reason": outcome.end_reason.value,
            "frames": outcome.frame_count,
            "flight_time_s": outcome.flight_time_s,
            "practice": self.config.practice,
        }
        self.report = emit_report(
            outcome.card,
            outcome.result.ledger,
            session=session_meta,
            questionnaire=self.questionnaire,
        )
        if self._session_dir is not None:
            self.report_path = os.path.join(self._session_dir, "report.json")
            write_report(self.report, self.report_path)
            if self.questionnaire is not None:
                write_report(
                    self.questionnaire.as_dict(),
                    os.path.join(self._session_dir, "questionnaire.json"),
                )
        self._queue(
            wire.MessageKind.REPORT_READY,
            {"path": self.report_path, "report": self.report},
        )

    async def _flush(self) -> None:
        for line in self._outgoing.take_all():
            try:
                await self.websocket.send(line)
            except (ConnectionClosed, OSError):
                self._mark_disconnected()
                return

    async def _send_error(
        self, code: str, detail: str, close_code: int | None = None
    ) -> None:
        message = wire.WireMessage(
            kind=wire.MessageKind.ERROR,
            seq=self._out_seq.take(),
            payload=wire.error_payload(code, detail),
        )
        try:
            await self.websocket.send(wire.encode_message(message))
            if close_code is not None:
                await self.websocket.close(code=close_code, reason=code)
        except (ConnectionClosed, OSError):
            self._mark_disconnected()

    async def run(self) -> SessionOutcome:
        # Handshake: hello in, scenario summary out.
        try:
            raw = await self.websocket.recv()
            message = wire.decode_message(raw)
            if message.kind is not wire.MessageKind.HELLO:
                raise wire.ProtocolError("first message must be hello")
            self._in_check.accept(message.seq)
            wire.check_hello(message.payload)
        except wire.ProtocolError as exc:
            await self._send_error("handshake", str(exc), close_code=1002)
            self.loop.abort()
            self.outcome = self.loop.finish()
            return self.outcome
        except (ConnectionClosed, OSError):
            self.loop.abort()
            self.outcome = self.loop.finish()
            return self.outcome
        self._queue(
            wire.MessageKind.SCENARIO_SUMMARY,
            wire.scenario_summary_payload(self.config.scenario),
        )

        recv_task = asyncio.create_task(self._recv_loop())
        send_task = asyncio.create_task(self._send_loop())
        try:
            await self._sim_loop()
            self.outcome = self.loop.finish()
            self._queue(
                wire.MessageKind.SESSION_END,
                wire.session_end_payload(
                    self.outcome.end_reason.value,
                    self.outcome.frame_count,
                    self.outcome.flight_time_s,
                ),
            )
            self._publish_report()
            if self.config.log_dir is not None and not self.config.practice:
                record_repetition(
                    self.config.log_dir, self.config.participant_id, self.outcome
                )
            # Leave the line open for the questionnaire until the client
            # hangs up (bounded so an idle cockpit cannot pin the server).
            try:
                await asyncio.wait_for(asyncio.shield(recv_task), QUESTIONNAIRE_WAIT_S)
            except asyncio.TimeoutError:
                pass
            await self._flush()
        finally:
            recv_task.cancel()
            send_task.cancel()
            try:
                await self.websocket.close()
            except (ConnectionClosed, OSError):
                pass
        return self.outcome


class GatewayServer:
    """Accepts one cockpit connection at a time; each starts a fresh session."""

    def __init__(self, config: GatewayConfig, host: str, port: int):
        self.config = config
        self.host = host
        self.port = port
        self.active_session: GatewaySession | None = None
        self.last_session: GatewaySession | None = None
        self.sessions_served = 0
        self._server = None

    async def start(self) -> None:
        self._server = await ws_serve(self._handler, self.host, self.port)
        # Port 0 binds an ephemeral port; report the real one.
        sockets = self._server.sockets or []
        if sockets:
            self.port = sockets[0].getsockname()[1]

    async def _handler(self, websocket) -> None:
        if self.active_session is not None:
            busy = wire.WireMessage(
                kind=wire.MessageKind.ERROR,
                seq=0,
                payload=wire.error_payload("busy", "a session is already active"),
            )
            try:
                await websocket.send(wire.encode_message(busy))
                await websocket.close(code=1013, reason="busy")
            except (ConnectionClosed, OSError):
                pass
            return
        session = GatewaySession(self.config, websocket)
        self.active_session = session
        try:
            await session.run()
        finally:
            self.active_session = None
            self.last_session = session
            self.sessions_served += 1

    async def close(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    async def serve_forever(self) -> None:
        if self._server is None:
            await self.start()
        await self._server.serve_forever()


def serve(config: GatewayConfig, address: str | None = None) -> None:
    """Blocking entry point used by the command line."""
    host, port = resolve_address(address)

    async def main() -> None:
        server = GatewayServer(config, host, port)
        await server.start()
        print(f"bridgesim gateway listening on ws://{server.host}:{server.port}")
        await server.serve_forever()

    try:
        asyncio.run(main())
    except KeyboardInterrupt:
        pass
