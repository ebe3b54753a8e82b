// Keyboard to stick mapping.
//
// Four axes plus two action keys. Axis keys give sustained input while
// held; the light and snapshot keys are edge-triggered: one press is one
// event no matter how long the key is held or how many auto-repeat
// keydowns the browser fires.

import { ControlAxes } from "./protocol.js";

export interface ControlSample {
  axes: ControlAxes;
  light: boolean;
  snapshot: boolean;
}

type AxisName = keyof ControlAxes;

interface KeyEventLike {
  code: string;
  preventDefault?: () => void;
}

interface KeyEventTarget {
  // Window in the browser, a stub object in tests.
  addEventListener(type: string, handler: (event: any) => void): void;
}

const AXIS_KEYS: Record<string, { axis: AxisName; value: 1 | -1 }> = {
  KeyW: { axis: "forward", value: 1 },
  KeyS: { axis: "forward", value: -1 },
  KeyD: { axis: "right", value: 1 },
  KeyA: { axis: "right", value: -1 },
  ArrowUp: { axis: "up", value: 1 },
  ArrowDown: { axis: "up", value: -1 },
  ArrowRight: { axis: "rotate", value: 1 },
  ArrowLeft: { axis: "rotate", value: -1 },
};

const LIGHT_KEY = "KeyB";
const SNAPSHOT_KEY = "KeyP";

export class CockpitInput {
  private readonly held = new Set<string>();
  private lightEdge = false;
  private snapshotEdge = false;

  constructor(target: KeyEventTarget) {
    target.addEventListener("keydown", (event: KeyEventLike) => this.keyDown(event));
    target.addEventListener("keyup", (event: KeyEventLike) => this.keyUp(event));
    target.addEventListener("blur", () => this.held.clear());
  }

  keyDown(event: KeyEventLike): void {
    const code = event.code;
    const bound = code in AXIS_KEYS || code === LIGHT_KEY || code === SNAPSHOT_KEY;
    if (!bound) return;
    event.preventDefault?.();
    if (this.held.has(code)) return; // still held, or a browser auto-repeat
    this.held.add(code);
    if (code === LIGHT_KEY) this.lightEdge = true;
    if (code === SNAPSHOT_KEY) this.snapshotEdge = true;
  }

  keyUp(event: KeyEventLike): void {
    this.held.delete(event.code);
  }

  private axis(name: AxisName): number {
    let value = 0;
    for (const [code, binding] of Object.entries(AXIS_KEYS)) {
      if (binding.axis === name && this.held.has(code)) {
        value += binding.value;
      }
    }
    return Math.max(-1, Math.min(1, value));
  }

  // Reads and clears the pending action edges; call once per send tick.
  sample(): ControlSample {
    const sampled: ControlSample = {
      axes: {
        forward: this.axis("forward"),
        right: this.axis("right"),
        up: this.axis("up"),
        rotate: this.axis("rotate"),
      },
      light: this.lightEdge,
      snapshot: this.snapshotEdge,
    };
    this.lightEdge = false;
    this.snapshotEdge = false;
    return sampled;
  }
}
