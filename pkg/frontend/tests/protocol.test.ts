// Wire protocol: round-trips, direction rules, and decode rejections.

import { describe, expect, it } from "vitest";

import {
  ALL_KINDS,
  CLIENT_KINDS,
  MessageKind,
  ProtocolError,
  SERVER_KINDS,
  SequenceChecker,
  SequenceCounter,
  WireMessage,
  checkDirection,
  checkHello,
  controlPayload,
  decodeLine,
  encodeMessage,
  helloPayload,
} from "../src/protocol.js";

// Deterministic PRNG so the property run is reproducible.
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const CHARS = 'abz09 _-."\\\n\t{}[]:,é→';

function randomString(rng: () => number): string {
  const n = Math.floor(rng() * 12);
  let out = "";
  for (let i = 0; i < n; i++) {
    out += CHARS[Math.floor(rng() * CHARS.length)];
  }
  return out;
}

function randomValue(rng: () => number, depth: number): unknown {
  const pick = rng();
  if (depth > 0 && pick < 0.15) {
    const obj: Record<string, unknown> = {};
    const n = Math.floor(rng() * 4);
    for (let i = 0; i < n; i++) {
      obj[`k${i}_${randomString(rng)}`] = randomValue(rng, depth - 1);
    }
    return obj;
  }
  if (depth > 0 && pick < 0.3) {
    const n = Math.floor(rng() * 4);
    return Array.from({ length: n }, () => randomValue(rng, depth - 1));
  }
  if (pick < 0.45) return randomString(rng);
  if (pick < 0.6) return Math.floor(rng() * 20001) - 10000;
  if (pick < 0.75) return Math.floor(rng() * 1e9) / 1e6;
  if (pick < 0.85) return rng() < 0.5;
  return null;
}

function randomMessage(rng: () => number, i: number): WireMessage {
  const kind = ALL_KINDS[i % ALL_KINDS.length];
  const payload: Record<string, unknown> = {};
  const n = Math.floor(rng() * 5);
  for (let k = 0; k < n; k++) {
    payload[`f${k}_${randomString(rng)}`] = randomValue(rng, 2);
  }
  return { kind, seq: Math.floor(rng() * 1_000_000), payload };
}

describe("encode/decode", () => {
  it("round-trips random messages of every kind", () => {
    const rng = mulberry32(0x5eed);
    for (let i = 0; i < 300; i++) {
      const message = randomMessage(rng, i);
      const line = encodeMessage(message);
      expect(line.endsWith("\n")).toBe(true);
      expect(line.slice(0, -1).includes("\n")).toBe(false);
      expect(decodeLine(line)).toEqual(message);
    }
  });

  it("rejects malformed json", () => {
    expect(() => decodeLine("this is not json")).toThrow(/^malformed message: /);
  });

  it("rejects non-object documents", () => {
    expect(() => decodeLine("[1, 2]")).toThrow("message must be a JSON object");
    expect(() => decodeLine("null")).toThrow("message must be a JSON object");
    expect(() => decodeLine('"frame"')).toThrow("message must be a JSON object");
  });

  it("rejects a missing kind", () => {
    expect(() => decodeLine('{"seq": 1, "payload": {}}')).toThrow("message missing kind");
  });

  it("rejects unknown kinds", () => {
    expect(() => decodeLine('{"kind": "bogus", "seq": 1, "payload": {}}')).toThrow(
      'unknown message kind "bogus"',
    );
    expect(() => decodeLine('{"kind": 3, "seq": 1, "payload": {}}')).toThrow(
      "unknown message kind 3",
    );
  });

  it("rejects bad sequence numbers", () => {
    expect(() => decodeLine('{"kind": "frame", "seq": 1.5, "payload": {}}')).toThrow(
      "message seq must be an integer",
    );
    expect(() => decodeLine('{"kind": "frame", "payload": {}}')).toThrow(
      "message seq must be an integer",
    );
  });

  it("rejects bad payloads", () => {
    expect(() => decodeLine('{"kind": "frame", "seq": 1, "payload": []}')).toThrow(
      "message payload must be an object",
    );
    expect(() => decodeLine('{"kind": "frame", "seq": 1}')).toThrow(
      "message payload must be an object",
    );
    expect(() => decodeLine('{"kind": "frame", "seq": 1, "payload": 7}')).toThrow(
      "message payload must be an object",
    );
  });

  it("raises ProtocolError instances", () => {
    expect(() => decodeLine("nope")).toThrow(ProtocolError);
  });
});

describe("direction rules", () => {
  it("partitions the kinds between client and server", () => {
    expect(CLIENT_KINDS.size + SERVER_KINDS.size).toBe(ALL_KINDS.length);
    for (const kind of ALL_KINDS) {
      expect(CLIENT_KINDS.has(kind) !== SERVER_KINDS.has(kind)).toBe(true);
    }
  });

  it("enforces who may send what", () => {
    const msg = (kind: MessageKind): WireMessage => ({ kind, seq: 0, payload: {} });
    expect(() => checkDirection(msg("control"), true)).not.toThrow();
    expect(() => checkDirection(msg("frame"), false)).not.toThrow();
    expect(() => checkDirection(msg("frame"), true)).toThrow(ProtocolError);
    expect(() => checkDirection(msg("control"), false)).toThrow(ProtocolError);
  });
});

describe("sequence numbers", () => {
  it("allocates from zero, strictly increasing", () => {
    const counter = new SequenceCounter();
    expect([counter.take(), counter.take(), counter.take()]).toEqual([0, 1, 2]);
  });

  it("tolerates gaps but rejects stalls and rewinds", () => {
    const checker = new SequenceChecker();
    checker.accept(0);
    checker.accept(7);
    expect(() => checker.accept(7)).toThrow("sequence number 7 not greater than 7");
    expect(() => checker.accept(3)).toThrow("sequence number 3 not greater than 7");
  });
});

describe("handshake helpers", () => {
  it("builds a hello payload with an optional participant", () => {
    expect(helloPayload()).toEqual({ v: 1 });
    expect(helloPayload("p01")).toEqual({ v: 1, participant: "p01" });
  });

  it("rejects version mismatches", () => {
    expect(() => checkHello({ v: 1 })).not.toThrow();
    expect(() => checkHello({ v: 2 })).toThrow(ProtocolError);
    expect(() => checkHello({})).toThrow(ProtocolError);
  });

  it("copies the axes into the control payload", () => {
    const axes = { forward: 1, right: 0, up: -1, rotate: 0 };
    const payload = controlPayload(axes, true, false);
    axes.forward = 0;
    expect(payload).toEqual({
      axes: { forward: 1, right: 0, up: -1, rotate: 0 },
      light: true,
      snapshot: false,
    });
  });
});
