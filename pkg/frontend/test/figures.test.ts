import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { parseCsv } from "../src/csv.js";
import { renderFigure } from "../src/figures.js";

const FIX = join(__dirname, "fixtures");

function load(name: string) {
  return parseCsv(readFileSync(join(FIX, name), "utf8"), name);
}

function checkSvg(svg: string) {
  expect(svg.startsWith("<svg")).toBe(true);
  expect(svg.endsWith("</svg>")).toBe(true);
  expect(svg).toContain("<polyline");
}

describe("figure rendering from real solver output", () => {
  it("operator error vs resolution", () => {
    const r = renderFigure("operator-error", [load("operator_error.csv")]);
    checkSvg(r.svg);
    expect(r.svg).toContain("power-law");
  });

  it("equilibrium tail with fitted slope near -(1+2s)", () => {
    const r = renderFigure("equilibrium-tail", [load("equilibrium.csv")]);
    checkSvg(r.svg);
    // fixture is the s=0.6 equilibrium
    expect(r.fits.tail_slope).toBeGreaterThan(-2.2 - 0.2);
    expect(r.fits.tail_slope).toBeLessThan(-2.2 + 0.2);
    expect(r.annotations[0]).toMatch(/tail slope -2\./);
  });

  it("entropy decay with a clean exponential fit", () => {
    const r = renderFigure("entropy-decay", [load("relaxation.csv")]);
    checkSvg(r.svg);
    expect(r.fits.rate).toBeLessThan(-1.0);
    expect(r.fits.r2).toBeGreaterThan(0.99);
  });

  it("energy traces render all three curves", () => {
    const r = renderFigure("energy-traces", [load("ap_series.csv")]);
    checkSvg(r.svg);
    for (const label of ["E_f", "E_g", "E_eta"]) expect(r.svg).toContain(label);
  });

  it("density comparison annotates the L1 gap", () => {
    const r = renderFigure("density-compare", [
      load("rho_ap.csv"),
      load("rho_limit.csv"),
    ]);
    checkSvg(r.svg);
    expect(r.annotations[0]).toMatch(/L1 difference/);
    const gap = Number(r.annotations[0].split(" ").pop());
    expect(gap).toBeLessThan(5e-2);
  });

  it("ap error trace renders", () => {
    const r = renderFigure("ap-error", [load("ap_series.csv")]);
    checkSvg(r.svg);
  });

  it("eps sweep with near-first-order annotation", () => {
    const r = renderFigure("eps-sweep", [load("eps_sweep.csv")]);
    checkSvg(r.svg);
    expect(r.fits.order).toBeGreaterThan(0.7);
    expect(r.fits.order).toBeLessThan(1.3);
  });

  it("dt refinement with near-first-order slope", () => {
    const r = renderFigure("dt-refinement", [load("dt_refinement.csv")]);
    checkSvg(r.svg);
    expect(r.fits.slope).toBeGreaterThan(0.85);
    expect(r.fits.slope).toBeLessThan(1.15);
  });

  it("rejects unknown kinds by name", () => {
    expect(() => renderFigure("pie-chart", [load("ap_series.csv")])).toThrow(
      /unknown figure kind 'pie-chart'/,
    );
  });

  it("reports missing columns by name", () => {
    expect(() => renderFigure("entropy-decay", [load("eps_sweep.csv")])).toThrow(
      /missing column 't'/,
    );
  });

  it("is deterministic", () => {
    const a = renderFigure("eps-sweep", [load("eps_sweep.csv")]).svg;
    const b = renderFigure("eps-sweep", [load("eps_sweep.csv")]).svg;
    expect(a).toBe(b);
  });
});
