// Canvas charts for the post-session results panel.
//
// Each function draws one chart payload exactly as the server computed it:
// axis names, values, and ranges all come from the report document, so the
// client never recomputes a score.

export interface KiviatData {
  axes: string[];
  values: number[];
  range: number[];
}

export interface WaterfallBar {
  task_id: number;
  gain: number;
  loss: number;
}

export interface WaterfallData {
  bars: WaterfallBar[];
  total: number;
}

export type ImprovementSeries = Record<string, (number | null)[]>;

const GRID_COLOR = "#2c3540";
const LABEL_COLOR = "#aab7c4";
const GAIN_COLOR = "#58d68d";
const LOSS_COLOR = "#ff6b5e";
const TOTAL_COLOR = "#5ad1e4";
const FONT = "11px system-ui, sans-serif";

function clearChart(ctx: CanvasRenderingContext2D, width: number, height: number): void {
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.globalAlpha = 1;
  ctx.setLineDash([]);
  ctx.fillStyle = "#141920";
  ctx.fillRect(0, 0, width, height);
}

/** Radar of the standardized dimensions over the range the server declares. */
export function drawKiviat(
  ctx: CanvasRenderingContext2D,
  data: KiviatData,
  width: number,
  height: number,
): void {
  clearChart(ctx, width, height);
  const cx = width / 2;
  const cy = height / 2 + 4;
  const radius = Math.min(width, height) / 2 - 36;
  const n = data.axes.length;
  const [lo, hi] = data.range;
  const span = hi - lo || 1;
  const angle = (i: number): number => -Math.PI / 2 + (2 * Math.PI * i) / n;

  ctx.strokeStyle = GRID_COLOR;
  ctx.lineWidth = 1;
  for (let ring = 1; ring <= 4; ring++) {
    ctx.beginPath();
    ctx.arc(cx, cy, (radius * ring) / 4, 0, 2 * Math.PI);
    ctx.stroke();
  }

  ctx.fillStyle = LABEL_COLOR;
  ctx.font = FONT;
  for (let i = 0; i < n; i++) {
    const a = angle(i);
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    ctx.lineTo(cx + radius * Math.cos(a), cy + radius * Math.sin(a));
    ctx.stroke();
    const lx = cx + (radius + 14) * Math.cos(a);
    const ly = cy + (radius + 14) * Math.sin(a);
    ctx.textAlign = Math.abs(Math.cos(a)) < 0.1 ? "center" : Math.cos(a) > 0 ? "left" : "right";
    ctx.fillText(data.axes[i], lx, ly + 4);
  }
  ctx.textAlign = "left";
  ctx.fillText(hi.toFixed(0), cx + 4, cy - radius + 11);
  ctx.fillText(lo.toFixed(0), cx + 4, cy - 2);

  ctx.beginPath();
  for (let i = 0; i < n; i++) {
    const a = angle(i);
    const f = Math.min(Math.max((data.values[i] - lo) / span, 0), 1);
    const x = cx + radius * f * Math.cos(a);
    const y = cy + radius * f * Math.sin(a);
    if (i === 0) {
      ctx.moveTo(x, y);
    } else {
      ctx.lineTo(x, y);
    }
  }
  ctx.closePath();
  ctx.fillStyle = "rgba(88, 214, 141, 0.24)";
  ctx.fill();
  ctx.strokeStyle = GAIN_COLOR;
  ctx.lineWidth = 2;
  ctx.stroke();
}

/** Per-task gains and losses stepping to the server's conformity total. */
export function drawWaterfall(
  ctx: CanvasRenderingContext2D,
  data: WaterfallData,
  width: number,
  height: number,
): void {
  clearChart(ctx, width, height);
  const left = 40;
  const right = width - 12;
  const top = 16;
  const bottom = height - 22;

  interface Step {
    from: number;
    to: number;
    color: string;
    label: string;
  }
  const steps: Step[] = [];
  let running = 0;
  for (const bar of data.bars) {
    steps.push({ from: running, to: running + bar.gain, color: GAIN_COLOR, label: `T${bar.task_id}` });
    running += bar.gain;
    steps.push({ from: running, to: running + bar.loss, color: LOSS_COLOR, label: "" });
    running += bar.loss;
  }
  steps.push({ from: 0, to: data.total, color: TOTAL_COLOR, label: "total" });

  let yMin = 0;
  let yMax = 0;
  for (const s of steps) {
    yMin = Math.min(yMin, s.from, s.to);
    yMax = Math.max(yMax, s.from, s.to);
  }
  const pad = (yMax - yMin || 1) * 0.1;
  yMin -= pad;
  yMax += pad;
  const toY = (v: number): number => bottom - ((v - yMin) / (yMax - yMin)) * (bottom - top);

  ctx.strokeStyle = GRID_COLOR;
  ctx.fillStyle = LABEL_COLOR;
  ctx.font = FONT;
  ctx.lineWidth = 1;
  for (let t = 0; t <= 4; t++) {
    const v = yMin + ((yMax - yMin) * t) / 4;
    const y = toY(v);
    ctx.beginPath();
    ctx.moveTo(left, y);
    ctx.lineTo(right, y);
    ctx.stroke();
    ctx.textAlign = "right";
    ctx.fillText(v.toFixed(0), left - 4, y + 4);
  }
  const zeroY = toY(0);
  ctx.strokeStyle = LABEL_COLOR;
  ctx.beginPath();
  ctx.moveTo(left, zeroY);
  ctx.lineTo(right, zeroY);
  ctx.stroke();

  const slotW = (right - left) / steps.length;
  const barW = slotW * 0.6;
  let prevX: number | null = null;
  let prevY = 0;
  steps.forEach((s, i) => {
    const x = left + slotW * i + (slotW - barW) / 2;
    const y0 = toY(s.from);
    const y1 = toY(s.to);
    ctx.fillStyle = s.color;
    ctx.fillRect(x, Math.min(y0, y1), barW, Math.max(Math.abs(y1 - y0), 1));
    if (prevX !== null && i < steps.length - 1) {
      ctx.strokeStyle = GRID_COLOR;
      ctx.beginPath();
      ctx.moveTo(prevX, prevY);
      ctx.lineTo(x, y0);
      ctx.stroke();
    }
    prevX = x + barW;
    prevY = y1;
    if (s.label) {
      ctx.fillStyle = LABEL_COLOR;
      ctx.textAlign = "center";
      ctx.fillText(s.label, x + barW / 2, bottom + 14);
    }
  });
  ctx.textAlign = "left";
}

const SERIES_COLORS = ["#58d68d", "#5ad1e4", "#f4d03f", "#ff6b5e", "#b48fc8"];

/** Percent change of each dimension across recorded sessions, when present. */
export function drawImprovement(
  ctx: CanvasRenderingContext2D,
  series: ImprovementSeries,
  width: number,
  height: number,
): void {
  clearChart(ctx, width, height);
  const names = Object.keys(series);
  const count = Math.max(...names.map((n) => series[n].length), 0);
  if (count === 0) {
    ctx.fillStyle = LABEL_COLOR;
    ctx.font = FONT;
    ctx.fillText("not enough sessions for a trend", 12, height / 2);
    return;
  }
  const left = 40;
  const right = width - 12;
  const top = 16;
  const bottom = height - 22;

  let yMin = 0;
  let yMax = 0;
  for (const name of names) {
    for (const v of series[name]) {
      if (v !== null) {
        yMin = Math.min(yMin, v);
        yMax = Math.max(yMax, v);
      }
    }
  }
  const pad = (yMax - yMin || 1) * 0.1;
  yMin -= pad;
  yMax += pad;
  const toY = (v: number): number => bottom - ((v - yMin) / (yMax - yMin)) * (bottom - top);
  const toX = (i: number): number =>
    count === 1 ? (left + right) / 2 : left + ((right - left) * i) / (count - 1);

  ctx.strokeStyle = GRID_COLOR;
  ctx.fillStyle = LABEL_COLOR;
  ctx.font = FONT;
  ctx.lineWidth = 1;
  for (let t = 0; t <= 4; t++) {
    const v = yMin + ((yMax - yMin) * t) / 4;
    const y = toY(v);
    ctx.beginPath();
    ctx.moveTo(left, y);
    ctx.lineTo(right, y);
    ctx.stroke();
    ctx.textAlign = "right";
    ctx.fillText(`${v.toFixed(0)}%`, left - 4, y + 4);
  }
  ctx.textAlign = "center";
  for (let i = 0; i < count; i++) {
    ctx.fillText(`s${i + 1}→s${i + 2}`, toX(i), bottom + 14);
  }

  names.forEach((name, idx) => {
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    let pen = false;
    series[name].forEach((v, i) => {
      if (v === null) {
        pen = false;
        return;
      }
      const x = toX(i);
      const y = toY(v);
      if (pen) {
        ctx.lineTo(x, y);
      } else {
        ctx.moveTo(x, y);
        pen = true;
      }
    });
    ctx.stroke();
    ctx.fillStyle = color;
    ctx.textAlign = "left";
    ctx.fillText(name, left + 6, top + 12 * (idx + 1));
  });
}
