// Keyboard mapping: sustained axes, one edge per action press.

import { describe, expect, it } from "vitest";

import { CockpitInput } from "../src/input.js";

class FakeTarget {
  handlers: Record<string, (event: any) => void> = {};
  prevented = 0;

  addEventListener(type: string, handler: (event: any) => void): void {
    this.handlers[type] = handler;
  }

  fire(type: string, code = ""): void {
    this.handlers[type]({ code, preventDefault: () => this.prevented++ });
  }
}

function rig(): { target: FakeTarget; input: CockpitInput } {
  const target = new FakeTarget();
  return { target, input: new CockpitInput(target) };
}

const IDLE = { forward: 0, right: 0, up: 0, rotate: 0 };

describe("axes", () => {
  it("maps all eight axis keys", () => {
    const { target, input } = rig();
    const cases: [string, string, number][] = [
      ["KeyW", "forward", 1],
      ["KeyS", "forward", -1],
      ["KeyD", "right", 1],
      ["KeyA", "right", -1],
      ["ArrowUp", "up", 1],
      ["ArrowDown", "up", -1],
      ["ArrowRight", "rotate", 1],
      ["ArrowLeft", "rotate", -1],
    ];
    for (const [code, axis, value] of cases) {
      target.fire("keydown", code);
      expect(input.sample().axes).toEqual({ ...IDLE, [axis]: value });
      target.fire("keyup", code);
      expect(input.sample().axes).toEqual(IDLE);
    }
  });

  it("holds the axis across samples until the key is released", () => {
    const { target, input } = rig();
    target.fire("keydown", "KeyW");
    expect(input.sample().axes.forward).toBe(1);
    expect(input.sample().axes.forward).toBe(1);
    target.fire("keyup", "KeyW");
    expect(input.sample().axes.forward).toBe(0);
  });

  it("cancels opposing keys and combines axes", () => {
    const { target, input } = rig();
    target.fire("keydown", "KeyW");
    target.fire("keydown", "KeyS");
    target.fire("keydown", "ArrowLeft");
    const sample = input.sample();
    expect(sample.axes.forward).toBe(0);
    expect(sample.axes.rotate).toBe(-1);
  });

  it("clears everything when the window loses focus", () => {
    const { target, input } = rig();
    target.fire("keydown", "KeyW");
    target.fire("keydown", "ArrowUp");
    target.fire("blur");
    expect(input.sample().axes).toEqual(IDLE);
  });

  it("ignores unbound keys and leaves their default behavior alone", () => {
    const { target, input } = rig();
    target.fire("keydown", "KeyZ");
    expect(target.prevented).toBe(0);
    expect(input.sample()).toEqual({ axes: IDLE, light: false, snapshot: false });
    target.fire("keydown", "KeyW");
    expect(target.prevented).toBe(1);
  });
});

describe("action edges", () => {
  it("emits exactly one snapshot per press despite auto-repeat", () => {
    const { target, input } = rig();
    // Browsers re-fire keydown while a key is held; only the first counts.
    target.fire("keydown", "KeyP");
    target.fire("keydown", "KeyP");
    target.fire("keydown", "KeyP");
    expect(input.sample().snapshot).toBe(true);
    expect(input.sample().snapshot).toBe(false);
    expect(input.sample().snapshot).toBe(false);
    target.fire("keyup", "KeyP");
    target.fire("keydown", "KeyP");
    expect(input.sample().snapshot).toBe(true);
  });

  it("emits one light toggle per press, held or not", () => {
    const { target, input } = rig();
    target.fire("keydown", "KeyB");
    target.fire("keydown", "KeyB");
    expect(input.sample().light).toBe(true);
    expect(input.sample().light).toBe(false);
    target.fire("keyup", "KeyB");
    target.fire("keydown", "KeyB");
    expect(input.sample().light).toBe(true);
  });

  it("keeps an edge pending until the next sample", () => {
    const { target, input } = rig();
    target.fire("keydown", "KeyP");
    target.fire("keyup", "KeyP");
    // Press and release between sends must still register once.
    expect(input.sample().snapshot).toBe(true);
    expect(input.sample().snapshot).toBe(false);
  });
});
