import { describe, expect, test } from "vitest";

import { ApiClient, type Point } from "../src/api.js";
import { CalibrationWizard } from "../src/calibration.js";
import { stubFetch, type StubCall, type StubRoute } from "./helpers.js";

const TRIANGLE: Point[] = [
  [0, 0],
  [1, 0],
  [0.5, 1],
];

const GENOME = { harmonic_count: 16, coeffs: [] as [number, number][] };

function wizardRoutes(): StubRoute[] {
  return [
    {
      method: "POST",
      path: /\/calibration\/trials$/,
      handler: (body) => {
        const { gene_i, gene_j } = body as { gene_i: number; gene_j: number };
        return {
          status: 201,
          body: {
            trial_id: "trial-0001",
            gene_i,
            gene_j,
            base: GENOME,
            variant_i: GENOME,
            variant_j: GENOME,
            previews: {
              base: TRIANGLE,
              variant_i: TRIANGLE,
              variant_j: TRIANGLE,
            },
          },
        };
      },
    },
    {
      method: "POST",
      path: /\/calibration\/trials\/trial-0001\/variant$/,
      handler: (body) => {
        const { scale } = body as { scale: number };
        return {
          body: {
            trial_id: "trial-0001",
            scale,
            variant_j: GENOME,
            preview: TRIANGLE.map(([x, y]) => [x * scale, y * scale]),
          },
        };
      },
    },
    {
      method: "POST",
      path: /\/calibration\/judgments$/,
      handler: (body) => {
        const request = body as { similarity_level: number };
        return {
          status: 201,
          body: {
            trial_id: "trial-0001",
            gene_i: 2,
            gene_j: 5,
            dist_i: 0.123,
            dist_j: 0.456,
            iso_similar: true,
            similarity_level: request.similarity_level,
          },
        };
      },
    },
  ];
}

function makeWizard(calls: StubCall[] = []): CalibrationWizard {
  const api = new ApiClient("http://stub", stubFetch(wizardRoutes(), calls));
  return new CalibrationWizard(api);
}

describe("confirm gating", () => {
  test("confirm is disabled at the trial's initial slider value", async () => {
    const wizard = makeWizard();
    await wizard.start(2, 5);
    expect(wizard.confirmEnabled).toBe(false);
    expect(wizard.markup({ width: 100, height: 100 })).toContain(
      'class="confirm" disabled',
    );
  });

  test("confirming before moving the slider posts nothing", async () => {
    const calls: StubCall[] = [];
    const wizard = makeWizard(calls);
    await wizard.start(2, 5);
    await expect(wizard.confirm(3)).rejects.toThrow("tune the slider");
    expect(calls.some((c) => c.url.endsWith("/judgments"))).toBe(false);
  });

  test("moving the slider enables confirm", async () => {
    const wizard = makeWizard();
    await wizard.start(2, 5);
    await wizard.setScale(1.6);
    expect(wizard.confirmEnabled).toBe(true);
    expect(wizard.markup({ width: 100, height: 100 })).not.toContain(
      'class="confirm" disabled',
    );
  });
});

describe("slider", () => {
  test("setScale re-renders G2 from the server response", async () => {
    const calls: StubCall[] = [];
    const wizard = makeWizard(calls);
    await wizard.start(2, 5);
    await wizard.setScale(2.0);
    const variantCall = calls.find((c) => c.url.includes("/variant"))!;
    expect(variantCall.body).toEqual({ scale: 2.0 });
    expect(wizard.sliderScale).toBe(2.0);
    expect(wizard.variantPreview![1]).toEqual([2, 0]);
  });
});

describe("judgment", () => {
  test("confirm posts the level and stores the server's distances verbatim", async () => {
    const calls: StubCall[] = [];
    const wizard = makeWizard(calls);
    await wizard.start(2, 5);
    await wizard.setScale(1.4);
    const judgment = await wizard.confirm(3);
    const judgmentCall = calls.find((c) => c.url.endsWith("/judgments"))!;
    expect(judgmentCall.body).toEqual({
      trial_id: "trial-0001",
      iso_similar: true,
      similarity_level: 3,
    });
    expect(judgment.similarity_level).toBe(3);
    expect(wizard.judgment).toEqual(judgment);
    expect(wizard.judgment!.dist_i).toBe(0.123);
    expect(wizard.judgment!.dist_j).toBe(0.456);
    expect(wizard.confirmEnabled).toBe(false);
  });

  test("abandoning a trial posts no judgment", async () => {
    const calls: StubCall[] = [];
    const wizard = makeWizard(calls);
    await wizard.start(2, 5);
    await wizard.setScale(0.7);
    wizard.abandon();
    expect(wizard.trial).toBeNull();
    expect(wizard.variantPreview).toBeNull();
    expect(calls.some((c) => c.url.endsWith("/judgments"))).toBe(false);
  });
});

describe("markup", () => {
  test("shows three panes and the percent labels of the level scale", async () => {
    const wizard = makeWizard();
    await wizard.start(2, 5);
    const markup = wizard.markup({ width: 100, height: 100 });
    expect(markup).toContain("base G0");
    expect(markup).toContain("gene 2 variant G1");
    expect(markup).toContain("gene 5 variant G2");
    for (const label of ["5%", "30%", "50%", "65%", "80%", "90%", "100%"]) {
      expect(markup).toContain(`>${label}</button>`);
    }
    expect(markup).toContain('class="variant-scale"');
  });
});
