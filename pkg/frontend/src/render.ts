// Schematic renderers for the cockpit's two viewports.
//
// Pure projection math plus canvas drawing.  Every physical quantity that
// matters to the session (corridor width, snapshot range, camera field of
// view, speed and battery limits) is read from the server's scenario and
// frame payloads; nothing here re-encodes the rules.

import {
  DefectSummary,
  ElementSummary,
  FramePayload,
  ScenarioSummary,
  TaskSummary,
} from "./protocol.js";

export type Vec3 = number[];

export interface Camera {
  position: Vec3;
  yaw: number; // radians, 0 looks along +x, counter-clockwise from above
  pitch: number; // radians, positive looks up
  hfovRad: number;
  vfovRad: number;
}

const NEAR_CLIP = 0.1;

/** Perspective-project a world point; null when it falls behind the camera. */
export function projectPoint(
  camera: Camera,
  point: Vec3,
  width: number,
  height: number,
): [number, number] | null {
  const dx = point[0] - camera.position[0];
  const dy = point[1] - camera.position[1];
  const dz = point[2] - camera.position[2];
  const cy = Math.cos(camera.yaw);
  const sy = Math.sin(camera.yaw);
  // Yaw first: ahead along the view axis, lateral to the right, up is world z.
  const ahead = dx * cy + dy * sy;
  const lateral = dx * sy - dy * cy;
  const cp = Math.cos(camera.pitch);
  const sp = Math.sin(camera.pitch);
  // Pitch rotates in the ahead/up plane about the lateral axis.
  const aheadP = ahead * cp + dz * sp;
  const upP = dz * cp - ahead * sp;
  if (aheadP < NEAR_CLIP) {
    return null;
  }
  const fx = width / 2 / Math.tan(camera.hfovRad / 2);
  const fy = height / 2 / Math.tan(camera.vfovRad / 2);
  return [width / 2 + (lateral / aheadP) * fx, height / 2 - (upP / aheadP) * fy];
}

export interface SceneFrame {
  center: Vec3;
  radius: number;
}

/** Bounding sphere of everything worth seeing, for framing the fixed camera. */
export function sceneFrame(scene: ScenarioSummary): SceneFrame {
  const lo = [Infinity, Infinity, Infinity];
  const hi = [-Infinity, -Infinity, -Infinity];
  const take = (p: number[]): void => {
    for (let axis = 0; axis < 3; axis++) {
      lo[axis] = Math.min(lo[axis], p[axis]);
      hi[axis] = Math.max(hi[axis], p[axis]);
    }
  };
  take(scene.ground_station);
  for (const el of scene.elements) {
    take(el.aabb[0]);
    take(el.aabb[1]);
  }
  for (const task of scene.tasks) {
    for (const p of task.points) {
      take(p);
    }
  }
  const center = [0, 1, 2].map((axis) => (lo[axis] + hi[axis]) / 2);
  let radius = 0;
  for (let axis = 0; axis < 3; axis++) {
    radius = Math.max(radius, (hi[axis] - lo[axis]) / 2);
  }
  return { center, radius: Math.max(radius, 1) };
}

/** Fixed observer behind the ground station, looking at the scene center. */
export function operatorCamera(
  scene: ScenarioSummary,
  width: number,
  height: number,
): Camera {
  const { center, radius } = sceneFrame(scene);
  const station = scene.ground_station;
  let ox = station[0] - center[0];
  let oy = station[1] - center[1];
  const norm = Math.hypot(ox, oy);
  if (norm < 1e-9) {
    ox = 1;
    oy = 0;
  } else {
    ox /= norm;
    oy /= norm;
  }
  const distance = radius * 1.9;
  const position = [
    center[0] + ox * distance,
    center[1] + oy * distance,
    center[2] + radius * 0.85,
  ];
  const yaw = Math.atan2(center[1] - position[1], center[0] - position[0]);
  const horizontal = Math.hypot(center[0] - position[0], center[1] - position[1]);
  const pitch = Math.atan2(center[2] - position[2], horizontal);
  const hfovRad = Math.PI / 3;
  const vfovRad = 2 * Math.atan(Math.tan(hfovRad / 2) * (height / width));
  return { position, yaw, pitch, hfovRad, vfovRad };
}

/** First-person camera riding the drone, field of view from the job payload. */
export function droneCamera(
  scene: ScenarioSummary,
  frame: FramePayload,
  width: number,
  height: number,
): Camera {
  void width;
  void height;
  const [hDeg, vDeg] = scene.job.camera_fov_deg;
  return {
    position: frame.position,
    yaw: frame.yaw,
    pitch: 0,
    hfovRad: (hDeg * Math.PI) / 180,
    vfovRad: (vDeg * Math.PI) / 180,
  };
}

// ---------------------------------------------------------------------------
// drawing

const ELEMENT_COLORS: Record<string, string> = {
  slab: "#8fa8c8",
  arch: "#c8b48f",
  pier: "#9f8fc8",
  interlayer: "#8fc8b0",
  deck: "#c8908f",
  terrain: "#4a5547",
  water: "#2d4a63",
};

const TASK_COLOR = "#58d68d";
const ACTIVE_TASK_COLOR = "#f4d03f";
const DRONE_COLOR = "#ff6b5e";
const TRAFFIC_COLORS: Record<string, string> = {
  human: "#e4c04a",
  vehicle: "#5ad1e4",
};

function elementColor(kind: string): string {
  return ELEMENT_COLORS[kind] ?? "#9e9e9e";
}

// Corner i has bit 0 -> x, bit 1 -> y, bit 2 -> z; pairs trace the 12 edges.
const BOX_EDGES: [number, number][] = [
  [0, 1], [2, 3], [4, 5], [6, 7],
  [0, 2], [1, 3], [4, 6], [5, 7],
  [0, 4], [1, 5], [2, 6], [3, 7],
];

function boxCorner(aabb: number[][], index: number): Vec3 {
  const pick = (axis: number, bit: number): number =>
    (index >> bit) & 1 ? aabb[1][axis] : aabb[0][axis];
  return [pick(0, 0), pick(1, 1), pick(2, 2)];
}

function strokeSegment(
  ctx: CanvasRenderingContext2D,
  camera: Camera,
  a: Vec3,
  b: Vec3,
  width: number,
  height: number,
): void {
  const pa = projectPoint(camera, a, width, height);
  const pb = projectPoint(camera, b, width, height);
  if (pa === null || pb === null) {
    return;
  }
  ctx.moveTo(pa[0], pa[1]);
  ctx.lineTo(pb[0], pb[1]);
}

function strokeBox(
  ctx: CanvasRenderingContext2D,
  camera: Camera,
  element: ElementSummary,
  width: number,
  height: number,
): void {
  ctx.beginPath();
  for (const [i, j] of BOX_EDGES) {
    strokeSegment(ctx, camera, boxCorner(element.aabb, i), boxCorner(element.aabb, j), width, height);
  }
  ctx.strokeStyle = elementColor(element.kind);
  ctx.lineWidth = element.crashable ? 1.4 : 1;
  ctx.globalAlpha = element.crashable ? 0.9 : 0.45;
  ctx.stroke();
  ctx.globalAlpha = 1;
}

function strokePath(
  ctx: CanvasRenderingContext2D,
  camera: Camera,
  points: number[][],
  width: number,
  height: number,
): void {
  ctx.beginPath();
  for (let k = 0; k + 1 < points.length; k++) {
    strokeSegment(ctx, camera, points[k], points[k + 1], width, height);
  }
  ctx.stroke();
}

function markerAt(
  ctx: CanvasRenderingContext2D,
  point: [number, number] | null,
  size: number,
  color: string,
): void {
  if (point === null) {
    return;
  }
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(point[0], point[1], size, 0, 2 * Math.PI);
  ctx.fill();
}

function clearPane(ctx: CanvasRenderingContext2D, width: number, height: number): void {
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.globalAlpha = 1;
  ctx.setLineDash([]);
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, width, height);
}

/** Overview pane: whole scene from a fixed camera near the ground station. */
export function drawOperatorView(
  ctx: CanvasRenderingContext2D,
  scene: ScenarioSummary,
  frame: FramePayload | null,
  width: number,
  height: number,
): void {
  clearPane(ctx, width, height);
  const camera = operatorCamera(scene, width, height);

  for (const element of scene.elements) {
    strokeBox(ctx, camera, element, width, height);
  }

  for (const task of scene.tasks) {
    const active = frame !== null && frame.task === task.id;
    ctx.strokeStyle = active ? ACTIVE_TASK_COLOR : TASK_COLOR;
    ctx.lineWidth = active ? 2 : 1.2;
    ctx.setLineDash(active ? [] : [6, 4]);
    strokePath(ctx, camera, task.points, width, height);
    ctx.setLineDash([]);
    const label = projectPoint(camera, task.points[0], width, height);
    if (label !== null) {
      ctx.fillStyle = ctx.strokeStyle;
      ctx.font = "11px system-ui, sans-serif";
      ctx.fillText(`T${task.id}`, label[0] + 4, label[1] - 4);
    }
  }

  const station = projectPoint(camera, scene.ground_station, width, height);
  markerAt(ctx, station, 4, "#c3cbd6");
  if (station !== null) {
    ctx.fillStyle = "#c3cbd6";
    ctx.font = "11px system-ui, sans-serif";
    ctx.fillText("GS", station[0] + 6, station[1] + 4);
  }

  if (frame !== null) {
    for (const dot of frame.traffic) {
      const p = projectPoint(camera, dot.position, width, height);
      markerAt(ctx, p, 3, TRAFFIC_COLORS[dot.kind] ?? "#9e9e9e");
    }
    const groundZ = scene.ground_station[2];
    ctx.strokeStyle = DRONE_COLOR;
    ctx.lineWidth = 1;
    ctx.setLineDash([3, 3]);
    ctx.beginPath();
    strokeSegment(
      ctx,
      camera,
      frame.position,
      [frame.position[0], frame.position[1], groundZ],
      width,
      height,
    );
    ctx.stroke();
    ctx.setLineDash([]);
    const drone = projectPoint(camera, frame.position, width, height);
    markerAt(ctx, drone, 5, DRONE_COLOR);
  }
}

function drawDefectMarker(
  ctx: CanvasRenderingContext2D,
  at: [number, number],
  defect: DefectSummary,
): void {
  ctx.strokeStyle = "#ff934d";
  ctx.lineWidth = 2;
  const r = 7;
  ctx.beginPath();
  ctx.moveTo(at[0], at[1] - r);
  ctx.lineTo(at[0] + r, at[1]);
  ctx.lineTo(at[0], at[1] + r);
  ctx.lineTo(at[0] - r, at[1]);
  ctx.closePath();
  ctx.stroke();
  ctx.fillStyle = "#ff934d";
  ctx.font = "10px system-ui, sans-serif";
  ctx.fillText(defect.id, at[0] + r + 2, at[1] + 3);
}

function corridorOverlay(
  ctx: CanvasRenderingContext2D,
  camera: Camera,
  task: TaskSummary,
  width: number,
  height: number,
): void {
  // Thick translucent band whose on-screen width tracks the corridor
  // diameter at each segment's depth.
  const fx = width / 2 / Math.tan(camera.hfovRad / 2);
  for (let k = 0; k + 1 < task.points.length; k++) {
    const a = task.points[k];
    const b = task.points[k + 1];
    const pa = projectPoint(camera, a, width, height);
    const pb = projectPoint(camera, b, width, height);
    if (pa === null || pb === null) {
      continue;
    }
    const mid = [0, 1, 2].map((axis) => (a[axis] + b[axis]) / 2);
    const depth = Math.hypot(
      mid[0] - camera.position[0],
      mid[1] - camera.position[1],
      mid[2] - camera.position[2],
    );
    const band = Math.min(Math.max((2 * task.corridor_m * fx) / Math.max(depth, 1), 2), 40);
    ctx.strokeStyle = ACTIVE_TASK_COLOR;
    ctx.globalAlpha = 0.35;
    ctx.lineWidth = band;
    ctx.lineCap = "round";
    ctx.beginPath();
    ctx.moveTo(pa[0], pa[1]);
    ctx.lineTo(pb[0], pb[1]);
    ctx.stroke();
  }
  ctx.globalAlpha = 1;
  ctx.lineCap = "butt";
}

function distance3(a: number[], b: number[]): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

/** First-person pane: what the drone camera sees, with the task corridor. */
export function drawCameraView(
  ctx: CanvasRenderingContext2D,
  scene: ScenarioSummary,
  frame: FramePayload,
  width: number,
  height: number,
): void {
  clearPane(ctx, width, height);
  const camera = droneCamera(scene, frame, width, height);

  // Horizon reference: the camera is level, so it sits mid-pane.
  ctx.strokeStyle = "#232b36";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(0, height / 2);
  ctx.lineTo(width, height / 2);
  ctx.stroke();

  const passive = scene.elements.filter((el) => !el.crashable);
  const solid = scene.elements.filter((el) => el.crashable);
  for (const element of [...passive, ...solid]) {
    strokeBox(ctx, camera, element, width, height);
  }

  for (const task of scene.tasks) {
    if (frame.task === task.id) {
      corridorOverlay(ctx, camera, task, width, height);
      ctx.strokeStyle = ACTIVE_TASK_COLOR;
      ctx.lineWidth = 2;
    } else {
      ctx.strokeStyle = TASK_COLOR;
      ctx.lineWidth = 1;
      ctx.setLineDash([6, 4]);
    }
    strokePath(ctx, camera, task.points, width, height);
    ctx.setLineDash([]);
  }

  // Defects pop into view once the drone is inside snapshot range.
  for (const defect of scene.defects) {
    if (distance3(frame.position, defect.position) > scene.job.snapshot_range_m) {
      continue;
    }
    const p = projectPoint(camera, defect.position, width, height);
    if (p !== null) {
      drawDefectMarker(ctx, p, defect);
    }
  }

  if (frame.light_on) {
    // Headlight wash: brighten the middle of the pane.
    const glow = ctx.createRadialGradient(
      width / 2,
      height / 2,
      0,
      width / 2,
      height / 2,
      Math.min(width, height) / 2,
    );
    glow.addColorStop(0, "rgba(255, 248, 220, 0.18)");
    glow.addColorStop(1, "rgba(255, 248, 220, 0)");
    ctx.fillStyle = glow;
    ctx.fillRect(0, 0, width, height);
  }

  // Crosshair.
  ctx.strokeStyle = "#6c7a89";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(width / 2 - 9, height / 2);
  ctx.lineTo(width / 2 + 9, height / 2);
  ctx.moveTo(width / 2, height / 2 - 9);
  ctx.lineTo(width / 2, height / 2 + 9);
  ctx.stroke();
}
