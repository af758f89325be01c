import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { CsvError, column, parseCsv } from "../src/csv.js";

const FIX = join(__dirname, "fixtures");

describe("csv parsing", () => {
  it("reads metadata, columns and rows from a real series", () => {
    const t = parseCsv(
      readFileSync(join(FIX, "relaxation.csv"), "utf8"),
      "relaxation.csv",
    );
    expect(t.columns).toEqual(["step", "t", "H", "mass_error"]);
    expect(t.meta.s).toBe("0.6");
    expect(t.rows.length).toBeGreaterThan(100);
    const time = column(t, "t");
    expect(time[0]).toBe(0);
    for (let i = 1; i < time.length; i++) expect(time[i]).toBeGreaterThan(time[i - 1]);
  });

  it("round-trips 17-digit values exactly", () => {
    const t = parseCsv("a,b\n0.1000000000000000055511151231257827,2\n");
    expect(t.rows[0][0]).toBe(0.1);
  });

  it("names the file on empty series", () => {
    expect(() => parseCsv("# comment\nx,y\n", "empty.csv")).toThrowError(
      /empty\.csv.*empty series/,
    );
  });

  it("names the missing column", () => {
    const t = parseCsv("x,y\n1,2\n", "f.csv");
    expect(() => column(t, "rho")).toThrowError(/missing column 'rho'/);
    expect(() => column(t, "rho")).toThrowError(/f\.csv/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("x,y\n1,2,3\n", "r.csv")).toThrow(CsvError);
  });
});
