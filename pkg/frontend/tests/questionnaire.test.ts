// Questionnaire model: completeness gate, validation, and the wire payload.

import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import {
  LIKERT_CHOICES,
  OVERALL_QUESTIONS,
  PHASE_QUESTIONS,
  PHASES,
  QuestionnaireForm,
  QuestionnairePayload,
} from "../src/questionnaire.js";

const GOLDEN: QuestionnairePayload = JSON.parse(
  readFileSync(new URL("./fixtures/questionnaire_golden.json", import.meta.url), "utf-8"),
);

function fillFromGolden(): QuestionnaireForm {
  const form = new QuestionnaireForm(GOLDEN.participant_id);
  for (const [aspect, value] of Object.entries(GOLDEN.overall)) {
    form.setOverall(aspect, value);
  }
  for (const [phase, answers] of Object.entries(GOLDEN.by_phase)) {
    for (const [aspect, value] of Object.entries(answers)) {
      form.setPhase(phase, aspect, value);
    }
  }
  return form;
}

describe("question tables", () => {
  it("matches the statements the assessment ingests", () => {
    expect(OVERALL_QUESTIONS).toEqual({
      time_pressure:
        "I finished the inspection without stress in regard of the required time.",
      frustration:
        "I never felt insecure, irritated, stressed, or discomforted during this task.",
      in_task_feedback:
        "The in-task feedback (e.g. battery level, speed, messages) were helpful for me.",
    });
    expect(PHASE_QUESTIONS).toEqual({
      performance: "I finished the task with a good performance.",
      mental_demand: "It's easy to finish the task.",
      physical_demand:
        "There was no physical activity (including pressing, pulling, turning, " +
        "controlling, and holding) required in the task.",
    });
    expect([...PHASES]).toEqual([
      "calibration",
      "takeoff",
      "task1",
      "task2",
      "task3",
      "task4",
      "landing",
    ]);
  });

  it("offers the five point scale with agreement first", () => {
    expect(LIKERT_CHOICES.map((c) => c.value)).toEqual([1, 2, 3, 4, 5]);
    expect(LIKERT_CHOICES[0].label).toBe("strongly agree");
    expect(LIKERT_CHOICES[4].label).toBe("strongly disagree");
  });
});

describe("QuestionnaireForm", () => {
  it("reproduces the shared golden payload exactly", () => {
    const form = fillFromGolden();
    expect(form.isComplete()).toBe(true);
    expect(form.payload()).toEqual(GOLDEN);
  });

  it("starts empty and enumerates every missing slot", () => {
    const form = new QuestionnaireForm("p01");
    expect(form.isComplete()).toBe(false);
    const missing = form.missing();
    expect(missing.length).toBe(
      Object.keys(OVERALL_QUESTIONS).length +
        PHASES.length * Object.keys(PHASE_QUESTIONS).length,
    );
    expect(missing).toContain("overall/time_pressure");
    expect(missing).toContain("task3/mental_demand");
  });

  it("refuses to emit a payload while any answer is missing", () => {
    const form = fillFromGolden();
    expect(() => form.payload()).not.toThrow();

    const partial = new QuestionnaireForm(GOLDEN.participant_id);
    for (const [aspect, value] of Object.entries(GOLDEN.overall)) {
      partial.setOverall(aspect, value);
    }
    for (const [phase, answers] of Object.entries(GOLDEN.by_phase)) {
      for (const [aspect, value] of Object.entries(answers)) {
        if (phase === "landing" && aspect === "physical_demand") {
          continue;
        }
        partial.setPhase(phase, aspect, value);
      }
    }
    expect(partial.isComplete()).toBe(false);
    expect(partial.missing()).toEqual(["landing/physical_demand"]);
    expect(() => partial.payload()).toThrow(/incomplete/);
  });

  it("rejects unknown aspects and phases", () => {
    const form = new QuestionnaireForm("p01");
    expect(() => form.setOverall("vibes", 1)).toThrow(RangeError);
    expect(() => form.setPhase("task9", "performance", 1)).toThrow(RangeError);
    expect(() => form.setPhase("task1", "vibes", 1)).toThrow(RangeError);
  });

  it("rejects ratings off the five point scale", () => {
    const form = new QuestionnaireForm("p01");
    for (const bad of [0, 6, 2.5, NaN, -1]) {
      expect(() => form.setOverall("frustration", bad)).toThrow(RangeError);
      expect(() => form.setPhase("task1", "performance", bad)).toThrow(RangeError);
    }
    expect(form.missing().length).toBe(
      Object.keys(OVERALL_QUESTIONS).length +
        PHASES.length * Object.keys(PHASE_QUESTIONS).length,
    );
  });

  it("lets a revised answer replace the old one", () => {
    const form = fillFromGolden();
    form.setOverall("time_pressure", 5);
    expect(form.payload().overall.time_pressure).toBe(5);
  });
});
