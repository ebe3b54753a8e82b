// Guard: the cockpit sources carry no scoring or threshold constants.
//
// Battery bands, speed limits, distance reminders, proximity cutoffs, and
// point values live on the server; frames and reports arrive pre-judged.
// This scan keeps the numbers from creeping back into client logic.

import { readFileSync, readdirSync } from "node:fs";

import { describe, expect, it } from "vitest";

const SRC_DIR = new URL("../src/", import.meta.url);

// Thresholds and weights the server owns.  Matches stand-alone numeric
// tokens only: "100", "0.25", or "x8" are fine, a bare "30" is not.
const FORBIDDEN: [RegExp, string][] = [
  [/(?<![\w.])(?:25|30|70|8)(?:\.0+)?(?![\w.])/g, "battery band / reminder threshold"],
  [/(?<![\w.])2\.50*(?![\w.])/g, "proximity cutoff"],
];

function stripComments(source: string): string {
  // Line comments only when // follows whitespace or starts the line, so
  // ws:// URLs survive; block comments are removed outright.
  return source
    .replace(/\/\*[\s\S]*?\*\//g, " ")
    .replace(/(^|\s)\/\/.*$/gm, "$1");
}

function violations(name: string, source: string): string[] {
  const out: string[] = [];
  stripComments(source)
    .split("\n")
    .forEach((line, idx) => {
      for (const [pattern, what] of FORBIDDEN) {
        pattern.lastIndex = 0;
        const hit = pattern.exec(line);
        if (hit !== null) {
          out.push(`${name}:${idx + 1}: ${what} "${hit[0]}" in ${line.trim()}`);
        }
      }
    });
  return out;
}

describe("source scan", () => {
  it("finds seeded violations, so the scan itself works", () => {
    expect(violations("seed.ts", "if (pct < 30) flash();")).toHaveLength(1);
    expect(violations("seed.ts", "const near = d <= 2.5;")).toHaveLength(1);
    expect(violations("seed.ts", "const points = 25;")).toHaveLength(1);
    expect(violations("seed.ts", "if (d < 8.0) remind();")).toHaveLength(1);
    expect(violations("seed.ts", "const ok = pct >= 70;")).toHaveLength(1);
    // Comments and embedded digits are not violations.
    expect(violations("seed.ts", "// reminder fires at 8 m")).toHaveLength(0);
    expect(violations("seed.ts", "const full = 100; let x = 0.25;")).toHaveLength(0);
    expect(violations("seed.ts", 'new WebSocket("ws://127.0.0.1:8765");')).toHaveLength(0);
  });

  it("keeps every scoring constant out of the cockpit sources", () => {
    const files = readdirSync(SRC_DIR).filter((name) => name.endsWith(".ts"));
    expect(files.length).toBeGreaterThanOrEqual(7);
    const found: string[] = [];
    for (const name of files) {
      const source = readFileSync(new URL(name, SRC_DIR), "utf-8");
      found.push(...violations(name, source));
    }
    expect(found).toEqual([]);
  });
});
