// Post-session questionnaire model.
//
// Pure state + validation, no DOM.  The cockpit builds its form from the
// question tables below and submits exactly the payload object returned by
// QuestionnaireForm.payload(); the server owns all interpretation of the
// answers.

export interface LikertChoice {
  value: number;
  label: string;
}

// 1 is the most positive answer, 5 the most negative.
export const LIKERT_CHOICES: readonly LikertChoice[] = [
  { value: 1, label: "strongly agree" },
  { value: 2, label: "agree" },
  { value: 3, label: "neutral" },
  { value: 4, label: "disagree" },
  { value: 5, label: "strongly disagree" },
];

const LIKERT_MIN = 1;
const LIKERT_MAX = 5;

// Statements rated once for the whole session.
export const OVERALL_QUESTIONS: Record<string, string> = {
  time_pressure:
    "I finished the inspection without stress in regard of the required time.",
  frustration:
    "I never felt insecure, irritated, stressed, or discomforted during this task.",
  in_task_feedback:
    "The in-task feedback (e.g. battery level, speed, messages) were helpful for me.",
};

// Statements rated once per flight phase.
export const PHASE_QUESTIONS: Record<string, string> = {
  performance: "I finished the task with a good performance.",
  mental_demand: "It's easy to finish the task.",
  physical_demand:
    "There was no physical activity (including pressing, pulling, turning, " +
    "controlling, and holding) required in the task.",
};

export const PHASES: readonly string[] = [
  "calibration",
  "takeoff",
  "task1",
  "task2",
  "task3",
  "task4",
  "landing",
];

export interface QuestionnairePayload {
  participant_id: string;
  overall: Record<string, number>;
  by_phase: Record<string, Record<string, number>>;
}

function checkRating(value: number): void {
  if (!Number.isInteger(value) || value < LIKERT_MIN || value > LIKERT_MAX) {
    throw new RangeError(`rating must be an integer in ${LIKERT_MIN}..${LIKERT_MAX}, got ${value}`);
  }
}

/** Collects Likert answers and refuses to emit a payload until every slot is filled. */
export class QuestionnaireForm {
  private overall = new Map<string, number>();
  private phase = new Map<string, number>();

  constructor(public readonly participantId: string) {}

  setOverall(aspect: string, value: number): void {
    if (!(aspect in OVERALL_QUESTIONS)) {
      throw new RangeError(`unknown overall aspect ${aspect}`);
    }
    checkRating(value);
    this.overall.set(aspect, value);
  }

  setPhase(phase: string, aspect: string, value: number): void {
    if (!PHASES.includes(phase)) {
      throw new RangeError(`unknown phase ${phase}`);
    }
    if (!(aspect in PHASE_QUESTIONS)) {
      throw new RangeError(`unknown phase aspect ${aspect}`);
    }
    checkRating(value);
    this.phase.set(`${phase}/${aspect}`, value);
  }

  /** Names of the slots still unanswered, for inline form hints. */
  missing(): string[] {
    const out: string[] = [];
    for (const aspect of Object.keys(OVERALL_QUESTIONS)) {
      if (!this.overall.has(aspect)) out.push(`overall/${aspect}`);
    }
    for (const phase of PHASES) {
      for (const aspect of Object.keys(PHASE_QUESTIONS)) {
        if (!this.phase.has(`${phase}/${aspect}`)) out.push(`${phase}/${aspect}`);
      }
    }
    return out;
  }

  isComplete(): boolean {
    return this.missing().length === 0;
  }

  payload(): QuestionnairePayload {
    const gaps = this.missing();
    if (gaps.length > 0) {
      throw new Error(`questionnaire incomplete: ${gaps.length} unanswered`);
    }
    const overall: Record<string, number> = {};
    for (const aspect of Object.keys(OVERALL_QUESTIONS)) {
      overall[aspect] = this.overall.get(aspect) as number;
    }
    const byPhase: Record<string, Record<string, number>> = {};
    for (const phase of PHASES) {
      const row: Record<string, number> = {};
      for (const aspect of Object.keys(PHASE_QUESTIONS)) {
        row[aspect] = this.phase.get(`${phase}/${aspect}`) as number;
      }
      byPhase[phase] = row;
    }
    return { participant_id: this.participantId, overall, by_phase: byPhase };
  }
}
