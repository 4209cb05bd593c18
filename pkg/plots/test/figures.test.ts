import { createHash } from "node:crypto";
import { mkdtempSync, readFileSync, writeFileSync, existsSync, copyFileSync, mkdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { render, FigureSpec } from "../src/figures.js";
import { encodePng } from "../src/png.js";
import { main } from "../src/main.js";

const SAMPLES = join(__dirname, "..", "samples");

function renderBytes(spec: FigureSpec): Buffer {
  const c = render(spec);
  return encodePng(c.width, c.height, c.data);
}

function sha(buf: Buffer): string {
  return createHash("sha256").update(buf).digest("hex");
}

const CASES: Array<[string, string]> = [
  ["waterfall", join(SAMPLES, "trajectory")],
  ["dist-vs-time", join(SAMPLES, "trajectory")],
  ["generation-scaling", join(SAMPLES, "generation")],
  ["compare-hist", join(SAMPLES, "compare")],
];

describe("figure kinds", () => {
  for (const [kind, dir] of CASES) {
    it(`${kind} renders from shipped samples and is pixel-stable`, () => {
      const spec: FigureSpec = { kind, inputDir: dir, outFile: "unused.png" };
      const first = renderBytes(spec);
      const second = renderBytes(spec);
      expect(first.length).toBeGreaterThan(1000);
      expect(sha(first)).toBe(sha(second));
      // PNG magic
      expect(first.subarray(0, 4).toString("hex")).toBe("89504e47");
    });
  }

  it("unknown kind is rejected", () => {
    expect(() =>
      render({ kind: "pie", inputDir: join(SAMPLES, "generation"), outFile: "x.png" }),
    ).toThrow(/unknown figure kind/);
  });

  it("unknown schema version is refused", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-schema-"));
    copyFileSync(
      join(SAMPLES, "generation", "generation_scaling.csv"),
      join(dir, "generation_scaling.csv"),
    );
    writeFileSync(join(dir, "summary.json"), JSON.stringify({ schema_version: 99 }));
    expect(() =>
      render({ kind: "generation-scaling", inputDir: dir, outFile: "x.png" }),
    ).toThrow(/schema version/);
  });

  it("missing columns are reported", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-cols-"));
    writeFileSync(join(dir, "generation_scaling.csv"), "#meta {}\na,b\n1,2\n");
    expect(() =>
      render({ kind: "generation-scaling", inputDir: dir, outFile: "x.png" }),
    ).toThrow(/missing required column/);
  });

  it("empty data is reported", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-empty-"));
    writeFileSync(join(dir, "generation_scaling.csv"), "#meta {}\neps,t_star\n");
    expect(() =>
      render({ kind: "generation-scaling", inputDir: dir, outFile: "x.png" }),
    ).toThrow(/no data rows/);
  });
});

describe("cli", () => {
  it("writes a png and exits zero", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-cli-"));
    const out = join(dir, "fig.png");
    const rc = main(["generation-scaling", "--in", join(SAMPLES, "generation"), "--out", out]);
    expect(rc).toBe(0);
    expect(existsSync(out)).toBe(true);
    const bytes = readFileSync(out);
    expect(bytes.subarray(0, 4).toString("hex")).toBe("89504e47");
  });

  it("exits nonzero on schema mismatch", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-cli-bad-"));
    mkdirSync(join(dir, "in"), { recursive: true });
    copyFileSync(
      join(SAMPLES, "generation", "generation_scaling.csv"),
      join(dir, "in", "generation_scaling.csv"),
    );
    writeFileSync(join(dir, "in", "summary.json"), JSON.stringify({ schema_version: 99 }));
    const rc = main(["generation-scaling", "--in", join(dir, "in"), "--out", join(dir, "o.png")]);
    expect(rc).toBe(1);
  });
});
