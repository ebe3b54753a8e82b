// Cockpit entry point: socket wiring, the input pump, and panel updates.
//
// Rendering is latest-frame-wins: incoming frames fill a slot that the
// animation loop consumes, so a backlog never queues stale redraws.  All
// judgements (battery bands, feedback, scores) arrive from the server and
// are displayed verbatim.

import {
  drawImprovement,
  drawKiviat,
  drawWaterfall,
  ImprovementSeries,
  KiviatData,
  WaterfallData,
} from "./charts.js";
import { applyHud, hudView, statusLine } from "./hud.js";
import { CockpitInput } from "./input.js";
import {
  checkDirection,
  controlPayload,
  decodeLine,
  encodeMessage,
  ErrorPayload,
  FeedbackPayload,
  FramePayload,
  helloPayload,
  HudPayload,
  MessageKind,
  ReportReadyPayload,
  ScenarioSummary,
  SequenceChecker,
  SequenceCounter,
  SessionEndPayload,
  WireMessage,
} from "./protocol.js";
import {
  LIKERT_CHOICES,
  OVERALL_QUESTIONS,
  PHASE_QUESTIONS,
  PHASES,
  QuestionnaireForm,
} from "./questionnaire.js";
import { drawCameraView, drawOperatorView } from "./render.js";

const CONTROL_INTERVAL_MS = 40;
const FALLBACK_ADDRESS = "127.0.0.1:8765";
const FEED_LIMIT = 60;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

function paneSize(canvas: HTMLCanvasElement): [number, number] {
  // Match the backing store to the CSS box so lines stay crisp.
  const w = canvas.clientWidth || canvas.width;
  const h = canvas.clientHeight || canvas.height;
  if (canvas.width !== w) canvas.width = w;
  if (canvas.height !== h) canvas.height = h;
  return [w, h];
}

class Cockpit {
  private socket: WebSocket | null = null;
  private outSeq = new SequenceCounter();
  private inCheck = new SequenceChecker();
  private readonly input = new CockpitInput(window);
  private scene: ScenarioSummary | null = null;
  private lastFrame: FramePayload | null = null;
  private drawPending = false;
  private pumpTimer: number | null = null;
  private form: QuestionnaireForm | null = null;
  private ended = false;

  private readonly status = byId<HTMLElement>("status");
  private readonly addressInput = byId<HTMLInputElement>("address");
  private readonly participantInput = byId<HTMLInputElement>("participant");
  private readonly connectBtn = byId<HTMLButtonElement>("connect-btn");
  private readonly opView = byId<HTMLCanvasElement>("op-view");
  private readonly camView = byId<HTMLCanvasElement>("cam-view");
  private readonly frameStatus = byId<HTMLElement>("frame-status");
  private readonly activeMessages = byId<HTMLElement>("active-messages");
  private readonly messages = byId<HTMLElement>("messages");
  private readonly sessionBanner = byId<HTMLElement>("session-banner");
  private readonly questionnairePanel = byId<HTMLElement>("questionnaire-panel");
  private readonly questionnaireHost = byId<HTMLElement>("questionnaire");
  private readonly questionnaireNote = byId<HTMLElement>("questionnaire-note");
  private readonly submitBtn = byId<HTMLButtonElement>("submit-questionnaire");
  private readonly results = byId<HTMLElement>("results");
  private readonly scoreTable = byId<HTMLElement>("score-table");
  private readonly hudEls = {
    battery: byId<HTMLElement>("battery-text"),
    batteryFill: byId<HTMLElement>("battery-fill"),
    speed: byId<HTMLElement>("speed-text"),
    light: byId<HTMLElement>("light-text"),
  };

  constructor() {
    this.addressInput.value = FALLBACK_ADDRESS;
    this.connectBtn.addEventListener("click", () => this.connect());
    this.submitBtn.addEventListener("click", () => this.submitQuestionnaire());
    const loop = (): void => {
      this.draw();
      requestAnimationFrame(loop);
    };
    requestAnimationFrame(loop);
  }

  // -- connection ----------------------------------------------------------

  private connect(): void {
    if (this.socket !== null) {
      this.socket.onclose = null;
      this.socket.close();
    }
    this.outSeq = new SequenceCounter();
    this.inCheck = new SequenceChecker();
    this.scene = null;
    this.lastFrame = null;
    this.ended = false;
    this.form = null;
    this.messages.textContent = "";
    this.activeMessages.textContent = "";
    this.sessionBanner.textContent = "";
    this.sessionBanner.classList.add("hidden");
    this.questionnairePanel.classList.add("hidden");
    this.results.classList.add("hidden");
    this.submitBtn.disabled = true;
    this.questionnaireNote.textContent = "";

    const address = this.addressInput.value.trim() || FALLBACK_ADDRESS;
    this.setStatus(`connecting to ws://${address} ...`);
    const socket = new WebSocket(`ws://${address}`);
    this.socket = socket;
    socket.onopen = () => {
      const participant = this.participantInput.value.trim();
      this.sendMessage("hello", helloPayload(participant || undefined));
      this.setStatus("connected - waiting for the scenario");
    };
    socket.onmessage = (event: MessageEvent) => this.onRaw(String(event.data));
    socket.onerror = () => this.setStatus("socket error - is the server running?");
    socket.onclose = (event: CloseEvent) => {
      this.stopPump();
      const why = event.reason ? ` (${event.reason})` : "";
      this.setStatus(`disconnected${why} - press connect to start a new session`);
    };
  }

  private sendMessage(kind: MessageKind, payload: Record<string, unknown>): void {
    const socket = this.socket;
    if (socket === null || socket.readyState !== WebSocket.OPEN) {
      return;
    }
    const message: WireMessage = { kind, seq: this.outSeq.take(), payload };
    checkDirection(message, true);
    socket.send(encodeMessage(message));
  }

  private startPump(): void {
    this.stopPump();
    this.pumpTimer = window.setInterval(() => {
      if (this.ended) {
        return;
      }
      const sample = this.input.sample();
      this.sendMessage("control", controlPayload(sample.axes, sample.light, sample.snapshot));
    }, CONTROL_INTERVAL_MS);
  }

  private stopPump(): void {
    if (this.pumpTimer !== null) {
      window.clearInterval(this.pumpTimer);
      this.pumpTimer = null;
    }
  }

  private setStatus(text: string): void {
    this.status.textContent = text;
  }

  // -- incoming ------------------------------------------------------------

  private onRaw(data: string): void {
    let message: WireMessage;
    try {
      message = decodeLine(data);
      checkDirection(message, false);
      this.inCheck.accept(message.seq);
    } catch (exc) {
      this.setStatus(`protocol error: ${exc instanceof Error ? exc.message : exc}`);
      this.socket?.close();
      return;
    }
    this.dispatch(message);
  }

  private dispatch(message: WireMessage): void {
    switch (message.kind) {
      case "scenario_summary":
        this.scene = message.payload as unknown as ScenarioSummary;
        this.drawPending = true;
        this.startPump();
        this.setStatus(
          `scenario "${this.scene.name}" loaded - hold ArrowUp to take off ` +
            "(WASD moves, arrows climb and turn, B light, P snapshot)",
        );
        break;
      case "frame":
        this.lastFrame = message.payload as unknown as FramePayload;
        this.drawPending = true;
        this.frameStatus.textContent = statusLine(this.lastFrame);
        break;
      case "hud":
        applyHud(hudView(message.payload as unknown as HudPayload), this.hudEls);
        break;
      case "feedback":
        this.onFeedback(message.payload as unknown as FeedbackPayload);
        break;
      case "session_end":
        this.onSessionEnd(message.payload as unknown as SessionEndPayload);
        break;
      case "report_ready":
        this.onReport(message.payload as unknown as ReportReadyPayload);
        break;
      case "error":
        this.onError(message.payload as unknown as ErrorPayload);
        break;
      default:
        break;
    }
  }

  private onFeedback(payload: FeedbackPayload): void {
    this.activeMessages.textContent = "";
    for (const row of payload.active) {
      const chip = document.createElement("span");
      chip.className = `chip chip-${row.kind}`;
      chip.textContent = row.text;
      this.activeMessages.appendChild(chip);
    }
    for (const row of payload.new) {
      const line = document.createElement("div");
      line.className = `feed-row feed-${row.kind}`;
      const when = this.lastFrame === null ? "" : `[${this.lastFrame.t.toFixed(1)}s] `;
      line.textContent = `${when}${row.text}`;
      this.messages.prepend(line);
    }
    while (this.messages.childElementCount > FEED_LIMIT) {
      this.messages.lastElementChild?.remove();
    }
  }

  private onSessionEnd(payload: SessionEndPayload): void {
    this.ended = true;
    this.stopPump();
    this.sessionBanner.textContent =
      `session over: ${payload.reason.replaceAll("_", " ")} after ` +
      `${payload.frames} frames (${payload.flight_time_s.toFixed(1)} s of flight)`;
    this.sessionBanner.classList.remove("hidden");
    this.buildQuestionnaire();
    this.questionnairePanel.classList.remove("hidden");
    this.setStatus("session complete - fill in the questionnaire below");
  }

  private onReport(payload: ReportReadyPayload): void {
    const report = payload.report;
    if (
      typeof report !== "object" ||
      report === null ||
      !("scores" in report) ||
      !("charts" in report)
    ) {
      this.sessionBanner.textContent = "malformed report payload from server";
      this.sessionBanner.classList.remove("hidden");
      return;
    }
    this.renderReport(report);
    this.results.classList.remove("hidden");
    if (report.questionnaire !== undefined) {
      this.questionnaireNote.textContent = "questionnaire recorded - thank you";
      this.submitBtn.disabled = true;
    }
  }

  private onError(payload: ErrorPayload): void {
    if (payload.code === "questionnaire") {
      this.questionnaireNote.textContent = payload.detail;
      this.submitBtn.disabled = false;
      return;
    }
    this.sessionBanner.textContent = `server error (${payload.code}): ${payload.detail}`;
    this.sessionBanner.classList.remove("hidden");
    if (payload.code === "busy" || payload.code === "handshake") {
      this.setStatus(`rejected: ${payload.detail}`);
    }
  }

  // -- drawing -------------------------------------------------------------

  private draw(): void {
    if (!this.drawPending || this.scene === null) {
      return;
    }
    this.drawPending = false;
    const opCtx = this.opView.getContext("2d");
    if (opCtx !== null) {
      const [w, h] = paneSize(this.opView);
      drawOperatorView(opCtx, this.scene, this.lastFrame, w, h);
    }
    const camCtx = this.camView.getContext("2d");
    if (camCtx !== null && this.lastFrame !== null) {
      const [w, h] = paneSize(this.camView);
      drawCameraView(camCtx, this.scene, this.lastFrame, w, h);
    }
  }

  // -- results -------------------------------------------------------------

  private renderReport(report: Record<string, unknown>): void {
    const doc = report as any;
    const scores = doc.scores ?? {};
    const std = scores.standardized ?? {};
    const fmt = (v: unknown): string => (typeof v === "number" ? v.toFixed(1) : "-");

    this.scoreTable.textContent = "";
    const header = document.createElement("tr");
    for (const title of ["dimension", "raw", "standardized"]) {
      const th = document.createElement("th");
      th.textContent = title;
      header.appendChild(th);
    }
    this.scoreTable.appendChild(header);
    for (const name of ["conformity", "efficiency", "safety", "accuracy"]) {
      const tr = document.createElement("tr");
      for (const value of [name, fmt(scores[name]), fmt(std[name])]) {
        const td = document.createElement("td");
        td.textContent = value;
        tr.appendChild(td);
      }
      this.scoreTable.appendChild(tr);
    }
    const extras: string[] = [];
    extras.push(`precision ${fmt(scores.precision)}`);
    extras.push(`recall ${fmt(scores.recall)}`);
    extras.push(`f-measure ${fmt(scores.f_beta)}`);
    if (typeof scores.accuracy_note === "string") {
      extras.push(scores.accuracy_note);
    }
    if (typeof scores.precision_note === "string") {
      extras.push(scores.precision_note);
    }
    const tr = document.createElement("tr");
    const td = document.createElement("td");
    td.colSpan = 3;
    td.className = "score-extras";
    td.textContent = extras.join("  |  ");
    tr.appendChild(td);
    this.scoreTable.appendChild(tr);

    const charts = doc.charts ?? {};
    this.drawChart("radar-canvas", charts.kiviat, (ctx, w, h) =>
      drawKiviat(ctx, charts.kiviat as KiviatData, w, h),
    );
    this.drawChart("waterfall-canvas", charts.waterfall, (ctx, w, h) =>
      drawWaterfall(ctx, charts.waterfall as WaterfallData, w, h),
    );
    this.drawChart("improvement-canvas", doc.improvement, (ctx, w, h) =>
      drawImprovement(ctx, doc.improvement as ImprovementSeries, w, h),
    );
  }

  private drawChart(
    id: string,
    data: unknown,
    painter: (ctx: CanvasRenderingContext2D, w: number, h: number) => void,
  ): void {
    const canvas = document.getElementById(id) as HTMLCanvasElement | null;
    if (canvas === null) {
      return;
    }
    canvas.classList.toggle("hidden", data === undefined || data === null);
    if (data === undefined || data === null) {
      return;
    }
    const ctx = canvas.getContext("2d");
    if (ctx !== null) {
      const [w, h] = paneSize(canvas);
      painter(ctx, w, h);
    }
  }

  // -- questionnaire -------------------------------------------------------

  // Submission stays disabled until every statement has an answer.
  private refreshSubmitGate(): void {
    const form = this.form;
    const complete = form !== null && form.isComplete();
    this.submitBtn.disabled = !complete;
    if (complete) {
      this.questionnaireNote.textContent = "";
    }
  }

  private likertRow(
    label: string,
    group: string,
    onPick: (value: number) => void,
  ): HTMLElement {
    const row = document.createElement("div");
    row.className = "likert-row";
    const text = document.createElement("p");
    text.textContent = label;
    row.appendChild(text);
    const choices = document.createElement("div");
    choices.className = "likert-choices";
    for (const choice of LIKERT_CHOICES) {
      const wrap = document.createElement("label");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = group;
      radio.value = String(choice.value);
      radio.addEventListener("change", () => onPick(choice.value));
      wrap.appendChild(radio);
      wrap.appendChild(document.createTextNode(` ${choice.value} ${choice.label}`));
      choices.appendChild(wrap);
    }
    row.appendChild(choices);
    return row;
  }

  private buildQuestionnaire(): void {
    const participant = this.participantInput.value.trim() || "anonymous";
    this.form = new QuestionnaireForm(participant);
    this.questionnaireHost.textContent = "";

    const overallHead = document.createElement("h3");
    overallHead.textContent = "Overall";
    this.questionnaireHost.appendChild(overallHead);
    for (const [aspect, question] of Object.entries(OVERALL_QUESTIONS)) {
      this.questionnaireHost.appendChild(
        this.likertRow(question, `o-${aspect}`, (v) => {
          this.form?.setOverall(aspect, v);
          this.refreshSubmitGate();
        }),
      );
    }

    for (const phase of PHASES) {
      const head = document.createElement("h3");
      head.textContent = `Phase: ${phase}`;
      this.questionnaireHost.appendChild(head);
      for (const [aspect, question] of Object.entries(PHASE_QUESTIONS)) {
        this.questionnaireHost.appendChild(
          this.likertRow(question, `p-${phase}-${aspect}`, (v) => {
            this.form?.setPhase(phase, aspect, v);
            this.refreshSubmitGate();
          }),
        );
      }
    }
    this.refreshSubmitGate();
  }

  private submitQuestionnaire(): void {
    const form = this.form;
    if (form === null) {
      return;
    }
    if (!form.isComplete()) {
      const gaps = form.missing();
      this.questionnaireNote.textContent =
        `${gaps.length} question${gaps.length === 1 ? "" : "s"} still unanswered ` +
        `(first: ${gaps[0]})`;
      return;
    }
    this.sendMessage("questionnaire", form.payload() as unknown as Record<string, unknown>);
    this.questionnaireNote.textContent = "submitted - waiting for the updated report";
    this.submitBtn.disabled = true;
  }
}

new Cockpit();
