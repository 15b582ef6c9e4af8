// Evaluation grid: six individuals per page, grade buttons posting straight
// to the service, arrow paging, an evolve button gated on positive grades.
// The server is the source of truth; this controller only mirrors it.

import type {
  ApiClient,
  GenerationPage,
  IndividualPayload,
  SessionSummary,
} from "./api.js";
import { CARD_VIEWPORT, renderIndividualCard, type Viewport } from "./render.js";

export type CardState = {
  individual: IndividualPayload;
  // optimistic grade shown while the POST is in flight
  pendingFitness: number | null;
  error: string | null;
};

export class EvaluationPage {
  summary: SessionSummary | null = null;
  page: GenerationPage | null = null;
  cards: CardState[] = [];

  constructor(
    private readonly api: ApiClient,
    readonly sessionId: string,
  ) {}

  async load(generation?: number, page = 0): Promise<void> {
    this.summary = await this.api.getSession(this.sessionId);
    const gen = generation ?? this.summary.generation;
    this.page = await this.api.getGeneration(this.sessionId, gen, page);
    this.cards = this.page.individuals.map((individual) => ({
      individual,
      pendingFitness: null,
      error: null,
    }));
  }

  get pageCount(): number {
    return this.page?.page_count ?? 0;
  }

  get hasNextPage(): boolean {
    return this.page !== null && this.page.page + 1 < this.page.page_count;
  }

  get hasPrevPage(): boolean {
    return this.page !== null && this.page.page > 0;
  }

  async nextPage(): Promise<void> {
    if (this.page === null || !this.hasNextPage) return;
    await this.load(this.page.generation, this.page.page + 1);
  }

  async prevPage(): Promise<void> {
    if (this.page === null || !this.hasPrevPage) return;
    await this.load(this.page.generation, this.page.page - 1);
  }

  displayedFitness(card: CardState): number | null {
    return card.pendingFitness ?? card.individual.fitness;
  }

  async grade(individualId: number, fitness: number): Promise<void> {
    const card = this.cards.find((c) => c.individual.id === individualId);
    if (card === undefined) {
      throw new Error(`individual ${individualId} is not on this page`);
    }
    card.pendingFitness = fitness;
    card.error = null;
    try {
      const ack = await this.api.postGrade(this.sessionId, individualId, fitness);
      card.individual = { ...card.individual, fitness: ack.fitness };
      card.pendingFitness = null;
      // refresh the evolve gate from server truth
      this.summary = await this.api.getSession(this.sessionId);
    } catch (error) {
      // keep the card usable: drop the optimistic value, surface the error,
      // leave grading retryable
      card.pendingFitness = null;
      card.error = error instanceof Error ? error.message : String(error);
      throw error;
    }
  }

  get canEvolve(): boolean {
    return (this.summary?.positive_grades ?? 0) > 0;
  }

  async evolve(): Promise<SessionSummary> {
    const summary = await this.api.evolve(this.sessionId);
    this.summary = summary;
    await this.load(summary.generation, 0);
    return summary;
  }

  markup(viewport: Viewport = CARD_VIEWPORT): string {
    if (this.page === null) return `<div class="evaluation empty"></div>`;
    const cards = this.cards
      .map((card) => {
        const shown = {
          ...card.individual,
          fitness: this.displayedFitness(card),
        };
        const cardMarkup = renderIndividualCard(shown, viewport);
        if (card.error === null) return cardMarkup;
        return (
          cardMarkup.slice(0, -"</div>".length) +
          `<div class="card-error">${card.error}` +
          `<button class="retry" data-individual="${card.individual.id}">retry</button>` +
          `</div></div>`
        );
      })
      .join("");
    const evolveState = this.canEvolve ? "" : " disabled";
    return (
      `<div class="evaluation">` +
      `<div class="grid">${cards}</div>` +
      `<div class="pager">` +
      `<button class="prev"${this.hasPrevPage ? "" : " disabled"}>&#8592;</button>` +
      `<span>page ${this.page.page + 1} / ${this.page.page_count}` +
      ` &middot; generation ${this.page.generation}</span>` +
      `<button class="next"${this.hasNextPage ? "" : " disabled"}>&#8594;</button>` +
      `</div>` +
      `<button class="evolve"${evolveState}>evolve</button>` +
      `</div>`
    );
  }
}
