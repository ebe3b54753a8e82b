// The cockpit page declares every element id the entry script looks up.

import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

const html = readFileSync(new URL("../index.html", import.meta.url), "utf-8");
const main = readFileSync(new URL("../src/main.ts", import.meta.url), "utf-8");

function htmlIds(): Set<string> {
  const out = new Set<string>();
  for (const m of html.matchAll(/id="([^"]+)"/g)) {
    out.add(m[1]);
  }
  return out;
}

function scriptIds(): Set<string> {
  const out = new Set<string>();
  for (const m of main.matchAll(/byId[^(]*\("([^"]+)"\)/g)) {
    out.add(m[1]);
  }
  for (const m of main.matchAll(/drawChart\(\s*\n?\s*"([^"]+)"/g)) {
    out.add(m[1]);
  }
  return out;
}

describe("page wiring", () => {
  it("declares every element the script needs", () => {
    const declared = htmlIds();
    const missing = [...scriptIds()].filter((id) => !declared.has(id));
    expect(missing).toEqual([]);
  });

  it("extracts a realistic id set, so the scan is not vacuous", () => {
    expect(scriptIds().size).toBeGreaterThanOrEqual(20);
    expect([...scriptIds()]).toContain("battery-fill");
    expect([...scriptIds()]).toContain("radar-canvas");
  });

  it("loads the compiled entry module", () => {
    expect(html).toContain('<script type="module" src="./dist/main.js"></script>');
  });
});
