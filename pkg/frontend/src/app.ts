// Studio shell: collect traced silhouettes, then open an evaluation session
// seeded from them.

import type { ApiClient, Point } from "./api.js";
import { EvaluationPage } from "./evaluation.js";
import type { TraceCanvas } from "./trace.js";

export class DesignStudio {
  traced: Point[][] = [];

  constructor(private readonly api: ApiClient) {}

  acceptTrace(canvas: TraceCanvas): void {
    if (!canvas.canSubmit) {
      throw new Error("trace has too few points to keep");
    }
    this.traced.push(canvas.points.map(([x, y]) => [x, y]));
    canvas.clear();
  }

  get canStartSession(): boolean {
    return this.traced.length >= 2;
  }

  async startSession(seed?: number): Promise<EvaluationPage> {
    if (!this.canStartSession) {
      throw new Error("trace at least two silhouettes before starting");
    }
    const summary = await this.api.createSession({
      curves: this.traced.map((points) => ({ points })),
      seed,
    });
    const page = new EvaluationPage(this.api, summary.id);
    await page.load();
    return page;
  }
}
