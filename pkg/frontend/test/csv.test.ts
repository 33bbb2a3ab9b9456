import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { validateCsv, type CsvKind } from "../src/csv.js";

const fixture = (name: string) =>
  readFileSync(join(__dirname, "fixtures", name), "utf8");

const SIMULATOR_OUTPUTS: Array<[CsvKind, string]> = [
  ["lambda_search", "lambda_search.csv"],
  ["phase_boundary", "phase_boundary.csv"],
  ["survival_curve", "survival_curve.csv"],
  ["openness_sweep", "openness_sweep.csv"],
  ["perc_sweep", "perc_sweep.csv"],
];

describe("validateCsv on simulator output", () => {
  it.each(SIMULATOR_OUTPUTS)("accepts %s fixtures", (kind, file) => {
    const result = validateCsv(kind, fixture(file));
    expect(result.errors).toEqual([]);
    expect(result.ok).toBe(true);
    expect(result.rows.length).toBeGreaterThan(0);
  });

  it("accepts a trajectory sample", () => {
    const text = "t,infected_particles,contaminated_sites\n0.0,3,1\n0.5,2,1\n1.25,0,0\n";
    expect(validateCsv("trajectory", text).ok).toBe(true);
  });
});

describe("validateCsv rejections", () => {
  it("rejects a wrong header", () => {
    const result = validateCsv("survival_curve", "time,frac\n0,1\n");
    expect(result.ok).toBe(false);
    expect(result.errors[0]).toMatch(/bad header/);
  });

  it("rejects a non-monotone survival curve", () => {
    const text = "t,survival_fraction\n0.0,1.0\n1.0,0.4\n2.0,0.7\n";
    const result = validateCsv("survival_curve", text);
    expect(result.ok).toBe(false);
    expect(result.errors.join(" ")).toMatch(/non-increasing/);
  });

  it("rejects out-of-range probabilities", () => {
    const text = "t,survival_fraction\n0.0,1.5\n";
    expect(validateCsv("survival_curve", text).ok).toBe(false);
  });

  it("rejects ragged rows", () => {
    const text = "t,survival_fraction\n0.0\n";
    const result = validateCsv("survival_curve", text);
    expect(result.ok).toBe(false);
    expect(result.errors[0]).toMatch(/expected 2 fields/);
  });

  it("rejects an empty body", () => {
    const result = validateCsv("perc_sweep", "n,adjacency,p,spanning_fraction\n");
    expect(result.ok).toBe(false);
  });

  it("rejects a resolved boundary row without gamma_c_hat", () => {
    const text = "lambda,gamma_c_hat,resolved,trials_used\n1.0,,true,5\n";
    expect(validateCsv("phase_boundary", text).ok).toBe(false);
  });

  it("accepts an unresolved boundary row with empty gamma_c_hat", () => {
    const text = "lambda,gamma_c_hat,resolved,trials_used\n1.0,,false,90\n";
    expect(validateCsv("phase_boundary", text).ok).toBe(true);
  });

  it("rejects an upward lambda walk", () => {
    const text = "lambda,survived,sims_used\n1.0,false,5\n1.2,true,1\n";
    expect(validateCsv("lambda_search", text).ok).toBe(false);
  });
});
