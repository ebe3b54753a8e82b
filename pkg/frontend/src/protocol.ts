// Wire protocol between the cockpit and the session server.
//
// Messages are newline-delimited JSON objects, one per line:
//
//     {"kind": "<kind>", "seq": <int>, "payload": {...}}
//
// The hello payload carries a "v" field; both ends refuse to talk across
// protocol versions. Sequence numbers increase strictly per direction;
// gaps are allowed (the server drops frames for slow clients rather than
// delaying the simulation).

export const PROTOCOL_VERSION = 1;

export type MessageKind =
  | "hello"
  | "scenario_summary"
  | "control"
  | "frame"
  | "feedback"
  | "hud"
  | "session_end"
  | "report_ready"
  | "error"
  | "questionnaire";

export const ALL_KINDS: readonly MessageKind[] = [
  "hello",
  "scenario_summary",
  "control",
  "frame",
  "feedback",
  "hud",
  "session_end",
  "report_ready",
  "error",
  "questionnaire",
];

// Direction rules: the cockpit only ever sends these three kinds.
export const CLIENT_KINDS: ReadonlySet<MessageKind> = new Set([
  "hello",
  "control",
  "questionnaire",
]);
export const SERVER_KINDS: ReadonlySet<MessageKind> = new Set([
  "scenario_summary",
  "frame",
  "feedback",
  "hud",
  "session_end",
  "report_ready",
  "error",
]);

export class ProtocolError extends Error {}

export interface WireMessage {
  kind: MessageKind;
  seq: number;
  payload: Record<string, unknown>;
}

export function encodeMessage(message: WireMessage): string {
  return (
    JSON.stringify({
      kind: message.kind,
      seq: message.seq,
      payload: message.payload,
    }) + "\n"
  );
}

export function decodeLine(line: string): WireMessage {
  let doc: unknown;
  try {
    doc = JSON.parse(line);
  } catch (exc) {
    throw new ProtocolError(`malformed message: ${exc}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new ProtocolError("message must be a JSON object");
  }
  const record = doc as Record<string, unknown>;
  if (!("kind" in record)) {
    throw new ProtocolError("message missing kind");
  }
  const kind = record.kind;
  if (typeof kind !== "string" || !ALL_KINDS.includes(kind as MessageKind)) {
    throw new ProtocolError(`unknown message kind ${JSON.stringify(kind)}`);
  }
  const seq = record.seq;
  if (typeof seq !== "number" || !Number.isInteger(seq)) {
    throw new ProtocolError("message seq must be an integer");
  }
  const payload = record.payload;
  if (typeof payload !== "object" || payload === null || Array.isArray(payload)) {
    throw new ProtocolError("message payload must be an object");
  }
  return { kind: kind as MessageKind, seq, payload: payload as Record<string, unknown> };
}

export class SequenceCounter {
  private next = 0;

  take(): number {
    return this.next++;
  }
}

export class SequenceChecker {
  private last = -1;

  accept(seq: number): void {
    if (seq <= this.last) {
      throw new ProtocolError(`sequence number ${seq} not greater than ${this.last}`);
    }
    this.last = seq;
  }
}

export function checkDirection(message: WireMessage, fromClient: boolean): void {
  const allowed = fromClient ? CLIENT_KINDS : SERVER_KINDS;
  if (!allowed.has(message.kind)) {
    const side = fromClient ? "client" : "server";
    throw new ProtocolError(`kind ${message.kind} not allowed from ${side}`);
  }
}

export function helloPayload(participant?: string): Record<string, unknown> {
  const payload: Record<string, unknown> = { v: PROTOCOL_VERSION };
  if (participant !== undefined) {
    payload.participant = participant;
  }
  return payload;
}

export function checkHello(payload: Record<string, unknown>): void {
  if (payload.v !== PROTOCOL_VERSION) {
    throw new ProtocolError(
      `protocol version mismatch: got ${JSON.stringify(payload.v)}, need ${PROTOCOL_VERSION}`,
    );
  }
}

export interface ControlAxes {
  forward: number;
  right: number;
  up: number;
  rotate: number;
}

export function controlPayload(
  axes: ControlAxes,
  light: boolean,
  snapshot: boolean,
): Record<string, unknown> {
  return { axes: { ...axes }, light, snapshot };
}

// ---------------------------------------------------------------------------
// Server payload shapes (decoded views onto the wire JSON)

export interface TaskSummary {
  id: number;
  name: string;
  points: number[][];
  corridor_m: number;
  recommended_distance_m: number[];
  speed_limit_mps: number;
  light_required: boolean;
}

export interface ElementSummary {
  id: string;
  kind: string;
  aabb: number[][];
  crashable: boolean;
}

export interface DefectSummary {
  id: string;
  position: number[];
  host: string;
}

export interface ScenarioSummary {
  name: string;
  ground_station: number[];
  job: {
    frame_rate_hz: number;
    target_time_s: number;
    max_flight_time_s: number;
    max_speed_mps: number;
    battery_capacity_pct: number;
    snapshot_range_m: number;
    camera_fov_deg: number[];
  };
  drone: {
    collision_radius_m: number;
    max_forward_speed_mps: number;
    max_sideward_speed_mps: number;
    max_vertical_speed_mps: number;
    rotation_rate_rad_s: number;
  };
  tasks: TaskSummary[];
  elements: ElementSummary[];
  defects: DefectSummary[];
}

export interface TrafficDot {
  id: string;
  kind: string;
  position: number[];
}

export interface FramePayload {
  i: number;
  t: number;
  position: number[];
  yaw: number;
  speed_mps: number;
  battery_pct: number;
  light_on: boolean;
  task: number | null;
  path_distance_m: number;
  clearance_m: number;
  traffic: TrafficDot[];
}

export interface HudPayload {
  battery_pct: number;
  battery_color: string;
  battery_flashing: boolean;
  speed_mps: number;
  light_on: boolean;
}

export interface FeedbackRow {
  kind: string;
  text: string;
}

export interface FeedbackPayload {
  active: FeedbackRow[];
  new: FeedbackRow[];
}

export interface SessionEndPayload {
  reason: string;
  frames: number;
  flight_time_s: number;
}

export interface ReportReadyPayload {
  path: string | null;
  report: Record<string, unknown>;
}

export interface ErrorPayload {
  code: string;
  detail: string;
}
