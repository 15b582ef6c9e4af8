// Calibration wizard: one trial at a time, three silhouettes on screen, a
// slider that retunes the second variant server-side, then a seven-level
// judgment. Distances in the stored judgment are the server's numbers.

import type {
  ApiClient,
  JudgmentResponse,
  Point,
  TrialResponse,
} from "./api.js";
import { levelOptions, type LevelOption } from "./levels.js";
import { renderSilhouette, type Viewport } from "./render.js";

export class CalibrationWizard {
  trial: TrialResponse | null = null;
  sliderScale = 1.0;
  sliderMoved = false;
  variantPreview: Point[] | null = null;
  judgment: JudgmentResponse | null = null;
  error: string | null = null;

  constructor(private readonly api: ApiClient) {}

  async start(geneI: number, geneJ: number, seed?: number): Promise<void> {
    this.trial = await this.api.createTrial({
      gene_i: geneI,
      gene_j: geneJ,
      seed,
    });
    this.sliderScale = 1.0;
    this.sliderMoved = false;
    this.variantPreview = this.trial.previews.variant_j;
    this.judgment = null;
    this.error = null;
  }

  // confirm stays disabled until the slider has been touched: an untouched
  // trial has not been tuned to iso-similarity
  get confirmEnabled(): boolean {
    return this.trial !== null && this.sliderMoved && this.judgment === null;
  }

  async setScale(scale: number): Promise<void> {
    if (this.trial === null) {
      throw new Error("no active trial");
    }
    try {
      const response = await this.api.adjustVariant(this.trial.trial_id, scale);
      this.sliderScale = response.scale;
      this.variantPreview = response.preview;
      this.sliderMoved = true;
      this.error = null;
    } catch (error) {
      this.error = error instanceof Error ? error.message : String(error);
      throw error;
    }
  }

  async confirm(similarityLevel: number): Promise<JudgmentResponse> {
    if (this.trial === null) {
      throw new Error("no active trial");
    }
    if (!this.confirmEnabled) {
      throw new Error("tune the slider before confirming iso-similarity");
    }
    try {
      const judgment = await this.api.postJudgment({
        trial_id: this.trial.trial_id,
        iso_similar: true,
        similarity_level: similarityLevel,
      });
      this.judgment = judgment;
      this.error = null;
      return judgment;
    } catch (error) {
      this.error = error instanceof Error ? error.message : String(error);
      throw error;
    }
  }

  // walking away posts nothing; the trial simply goes idle server-side
  abandon(): void {
    this.trial = null;
    this.sliderScale = 1.0;
    this.sliderMoved = false;
    this.variantPreview = null;
    this.judgment = null;
    this.error = null;
  }

  levelOptions(): LevelOption[] {
    return levelOptions();
  }

  markup(viewport: Viewport): string {
    if (this.trial === null) return `<div class="wizard empty"></div>`;
    const panes = [
      ["base G0", this.trial.previews.base],
      [`gene ${this.trial.gene_i} variant G1`, this.trial.previews.variant_i],
      [
        `gene ${this.trial.gene_j} variant G2`,
        this.variantPreview ?? this.trial.previews.variant_j,
      ],
    ] as const;
    const shapes = panes
      .map(
        ([label, points]) =>
          `<figure>${renderSilhouette(points, viewport)}` +
          `<figcaption>${label}</figcaption></figure>`,
      )
      .join("");
    const picker = this.levelOptions()
      .map(
        ({ level, label }) =>
          `<button class="level" data-level="${level}">${label}</button>`,
      )
      .join("");
    const errorBox =
      this.error === null ? "" : `<div class="wizard-error">${this.error}</div>`;
    return (
      `<div class="wizard">` +
      `<div class="shapes">${shapes}</div>` +
      `<input type="range" class="variant-scale" min="0.05" max="3" ` +
      `step="0.05" value="${this.sliderScale}"/>` +
      `<div class="levels">${picker}</div>` +
      `<button class="confirm"${this.confirmEnabled ? "" : " disabled"}>` +
      `iso-similar</button>` +
      errorBox +
      `</div>`
    );
  }
}
