// HUD rendering from server payloads.
//
// The client never recomputes battery bands or any other threshold: the
// color and flashing flags arrive on the wire and are displayed verbatim.

import { FramePayload, HudPayload } from "./protocol.js";

export interface HudView {
  batteryText: string;
  batteryColor: string;
  batteryFlashing: boolean;
  batteryFillFraction: number;
  speedText: string;
  lightText: string;
}

export function hudView(payload: HudPayload): HudView {
  return {
    batteryText: `${payload.battery_pct.toFixed(0)}%`,
    batteryColor: payload.battery_color,
    batteryFlashing: payload.battery_flashing,
    batteryFillFraction: payload.battery_pct / 100,
    speedText: `${payload.speed_mps.toFixed(1)} m/s`,
    lightText: payload.light_on ? "light on" : "light off",
  };
}

// The named battery colors as CSS values; keys come from the server.
const BATTERY_CSS: Record<string, string> = {
  green: "#3fa34d",
  yellow: "#d9a404",
  red: "#c1392e",
};

export function batteryCss(color: string): string {
  return BATTERY_CSS[color] ?? "#9e9e9e";
}

// Minimal element shapes so tests can drive this without a real DOM.
export interface TextElementLike {
  textContent: string | null;
}

export interface StyledElementLike extends TextElementLike {
  style: { width: string; background: string; animation: string };
}

export interface HudElements {
  battery: TextElementLike;
  batteryFill: StyledElementLike;
  speed: TextElementLike;
  light: TextElementLike;
}

export function applyHud(view: HudView, els: HudElements): void {
  els.battery.textContent = view.batteryText;
  els.batteryFill.style.width = `${(view.batteryFillFraction * 100).toFixed(1)}%`;
  els.batteryFill.style.background = batteryCss(view.batteryColor);
  els.batteryFill.style.animation = view.batteryFlashing
    ? "hud-flash 0.5s step-start infinite"
    : "none";
  els.speed.textContent = view.speedText;
  els.light.textContent = view.lightText;
}

export function statusLine(frame: FramePayload): string {
  const task = frame.task === null ? "transit" : `task ${frame.task}`;
  const parts = [
    `t ${frame.t.toFixed(2)} s`,
    task,
    `path ${frame.path_distance_m.toFixed(1)} m`,
    `clear ${frame.clearance_m.toFixed(1)} m`,
  ];
  return parts.join("  |  ");
}
