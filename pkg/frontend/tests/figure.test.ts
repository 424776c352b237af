import { readFileSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { EmptyTableError, MissingColumnError } from "../src/errors.js";
import { renderFigure } from "../src/figure.js";

const FIXTURES = fileURLToPath(new URL("fixtures", import.meta.url));

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

function count(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

/** Small deterministic generator so property loops stay reproducible. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

describe("rmse_sweep figure", () => {
  const svg = renderFigure(fixture("rmse_sweep.csv"), {
    kind: "rmse_sweep",
    angle: 3,
  });

  it("draws one RMSE curve and two reference lines", () => {
    expect(count(svg, '<path class="rmse-curve"')).toBe(1);
    expect(count(svg, '<path class="crb-line"')).toBe(1);
    expect(count(svg, '<path class="acrb-line"')).toBe(1);
  });

  it("dashes only the bound references", () => {
    const rmse = svg.split("\n").find((l) => l.includes("rmse-curve"));
    const crb = svg.split("\n").find((l) => l.includes("crb-line"));
    const acrb = svg.split("\n").find((l) => l.includes("acrb-line"));
    expect(rmse).not.toContain("stroke-dasharray");
    expect(crb).toContain("stroke-dasharray");
    expect(acrb).toContain("stroke-dasharray");
    expect(crb).not.toContain(acrb!.match(/stroke-dasharray="[^"]*"/)![0]);
  });

  it("labels both axes and lists the legend entries", () => {
    expect(svg).toContain("sweep value");
    expect(svg).toContain("RMSE (degrees)");
    expect(svg).toContain("RMSE theta3");
    expect(svg).toContain("sqrt CRB");
    expect(svg).toContain("sqrt ACRB");
  });

  it("is a standalone svg document", () => {
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg.endsWith("</svg>\n")).toBe(true);
    expect(svg).toContain('xmlns="http://www.w3.org/2000/svg"');
  });

  it("re-renders byte-identically", () => {
    const again = renderFigure(fixture("rmse_sweep.csv"), {
      kind: "rmse_sweep",
      angle: 3,
    });
    expect(Buffer.from(again, "utf8").equals(Buffer.from(svg, "utf8"))).toBe(true);
  });

  it("names the missing column and lists the available ones", () => {
    let caught: unknown;
    try {
      renderFigure(fixture("rmse_sweep.csv"), { kind: "rmse_sweep", angle: 9 });
    } catch (err) {
      caught = err;
    }
    expect(caught).toBeInstanceOf(MissingColumnError);
    const e = caught as MissingColumnError;
    expect(e.message).toContain("rmse_theta9_deg");
    expect(e.message).toContain("rmse_theta1_deg");
    expect(e.available).toContain("sweep_value");
  });

  it("renders a single-row table as markers without crashing", () => {
    const text =
      "sweep_value,rmse_theta1_deg,crb_theta1_deg,acrb_theta1_deg,fail_count\n" +
      "100,0.21,0.05,0.04,0\n";
    const one = renderFigure(text, { kind: "rmse_sweep", angle: 1 });
    // a single point cannot form a path, so it shows as a marker
    expect(count(one, '<path class="rmse-curve"')).toBe(0);
    expect(count(one, '<circle class="rmse-curve"')).toBe(1);
  });

  it("rejects a non-positive angle index", () => {
    expect(() =>
      renderFigure(fixture("rmse_sweep.csv"), { kind: "rmse_sweep", angle: 0 }),
    ).toThrow(/angle/);
  });
});

describe("convergence figure", () => {
  const svg = renderFigure(fixture("convergence.csv"), {
    kind: "convergence",
    angle: 1,
  });

  it("draws one trace per angle column", () => {
    expect(count(svg, '<path class="trace-1"')).toBe(1);
    expect(count(svg, '<path class="trace-2"')).toBe(1);
    expect(count(svg, '<path class="trace-3"')).toBe(1);
  });

  it("labels iteration and error axes", () => {
    expect(svg).toContain(">iteration<");
    expect(svg).toContain("absolute error (degrees)");
  });

  it("drops exact zeros so the log axis stays valid", () => {
    const text =
      "iteration,abs_err_theta1_deg\n0,1\n1,0.1\n2,0\n3,0.001\n";
    const out = renderFigure(text, { kind: "convergence", angle: 1 });
    const path = out.split("\n").find((l) => l.includes("trace-1"))!;
    const d = path.match(/ d="([^"]*)"/)![1]!;
    // 4 rows, one dropped: M plus two L segments
    expect(count(d, "L")).toBe(2);
  });

  it("fails with a clear message when every value is non-positive", () => {
    const text = "iteration,abs_err_theta1_deg\n0,0\n1,0\n";
    expect(() => renderFigure(text, { kind: "convergence", angle: 1 })).toThrow(
      EmptyTableError,
    );
  });

  it("reports the trace columns it looked for when none exist", () => {
    const text = "iteration,wrong_deg\n0,1\n";
    expect(() => renderFigure(text, { kind: "convergence", angle: 1 })).toThrow(
      MissingColumnError,
    );
  });
});

describe("rendering is a pure function of the csv text", () => {
  it("is stable across repeated renders of generated tables", () => {
    for (let seed = 0; seed < 20; seed += 1) {
      const rand = mulberry32(seed);
      const rows = 2 + Math.floor(rand() * 6);
      const lines = ["sweep_value,rmse_theta1_deg,crb_theta1_deg,acrb_theta1_deg"];
      for (let r = 0; r < rows; r += 1) {
        const sweep = 10 * (r + 1);
        const rmse = 0.05 + rand();
        const crb = 0.2 * rmse;
        lines.push(`${sweep},${rmse},${crb},${0.9 * crb}`);
      }
      const text = lines.join("\n") + "\n";
      const a = renderFigure(text, { kind: "rmse_sweep", angle: 1 });
      const b = renderFigure(text, { kind: "rmse_sweep", angle: 1 });
      expect(b).toBe(a);
      expect(count(a, '<path class="rmse-curve"')).toBe(1);
    }
  });
});
