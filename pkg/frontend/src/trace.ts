// Click-to-trace canvas model. Raw clicked points go to the server as-is;
// densification and encoding happen there, the canvas only draws.

import type { ApiClient, Point, TraceResponse } from "./api.js";
import { renderSilhouette, svgPath, type Viewport } from "./render.js";

export const RECOMMENDED_MIN_POINTS = 60;
export const HARD_MIN_POINTS = 3;

export class TraceCanvas {
  points: Point[] = [];
  backgroundImage: string | null = null;
  closedPreview = true;
  decodedPreview: TraceResponse | null = null;

  constructor(private readonly api: ApiClient) {}

  addPoint(x: number, y: number): void {
    this.points.push([x, y]);
    this.decodedPreview = null;
  }

  undoPoint(): void {
    this.points.pop();
    this.decodedPreview = null;
  }

  clear(): void {
    this.points = [];
    this.decodedPreview = null;
  }

  toggleClosedPreview(): void {
    this.closedPreview = !this.closedPreview;
  }

  get pointCount(): number {
    return this.points.length;
  }

  // below three points there is nothing to close, so submission is blocked
  get canSubmit(): boolean {
    return this.points.length >= HARD_MIN_POINTS;
  }

  // between the hard minimum and the recommended count tracing is allowed
  // but warned: sparse outlines lose detail
  get warning(): string | null {
    if (!this.canSubmit || this.points.length >= RECOMMENDED_MIN_POINTS) {
      return null;
    }
    return (
      `${this.points.length} points traced; ` +
      `${RECOMMENDED_MIN_POINTS} or more are recommended for a faithful outline`
    );
  }

  async submit(): Promise<TraceResponse> {
    if (!this.canSubmit) {
      throw new Error(
        `need at least ${HARD_MIN_POINTS} points, got ${this.points.length}`,
      );
    }
    const response = await this.api.trace(this.points);
    this.decodedPreview = response;
    return response;
  }

  markup(viewport: Viewport): string {
    const parts: string[] = [];
    if (this.backgroundImage !== null) {
      parts.push(
        `<image href="${this.backgroundImage}" width="${viewport.width}" ` +
        `height="${viewport.height}" opacity="0.4"/>`,
      );
    }
    if (this.points.length > 0) {
      parts.push(
        `<path class="traced" d="${svgPath(this.points, this.closedPreview)}" ` +
        `fill="none" stroke="currentColor"/>`,
      );
    }
    for (const [x, y] of this.points) {
      parts.push(`<circle cx="${x}" cy="${y}" r="2"/>`);
    }
    const overlay =
      this.decodedPreview === null
        ? ""
        : renderSilhouette(
            this.decodedPreview.preview.points,
            viewport,
            "decoded-overlay",
          );
    return (
      `<div class="trace-canvas">` +
      `<svg viewBox="0 0 ${viewport.width} ${viewport.height}" ` +
      `width="${viewport.width}" height="${viewport.height}">` +
      parts.join("") +
      `</svg>` +
      overlay +
      `</div>`
    );
  }
}
