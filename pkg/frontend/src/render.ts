// SVG rendering for decoded silhouettes. Pure string builders: the server
// sends polylines, this module fits them into a viewport and nothing more.

import type { IndividualPayload, Point } from "./api.js";

export type Viewport = { width: number; height: number; margin?: number };

export const CARD_VIEWPORT: Viewport = { width: 280, height: 200, margin: 12 };

type Fit = { scale: number; tx: number; ty: number };

function boundingBox(points: Point[]) {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const [x, y] of points) {
    if (x < minX) minX = x;
    if (x > maxX) maxX = x;
    if (y < minY) minY = y;
    if (y > maxY) maxY = y;
  }
  return { minX, minY, maxX, maxY };
}

// Uniform scale centered in the viewport, so aspect ratio survives the fit.
// Screen y grows downward; the flip keeps mathematical orientation upright.
export function fitTransform(points: Point[], viewport: Viewport): Fit {
  const margin = viewport.margin ?? 0;
  const { minX, minY, maxX, maxY } = boundingBox(points);
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const scale = Math.min(
    (viewport.width - 2 * margin) / spanX,
    (viewport.height - 2 * margin) / spanY,
  );
  const tx = viewport.width / 2 - scale * (minX + maxX) / 2;
  const ty = viewport.height / 2 + scale * (minY + maxY) / 2;
  return { scale, tx, ty };
}

function project(points: Point[], fit: Fit): Point[] {
  return points.map(([x, y]) => [
    fit.scale * x + fit.tx,
    -fit.scale * y + fit.ty,
  ]);
}

const fmt = (v: number) => (Math.round(v * 100) / 100).toString();

export function svgPath(points: Point[], close = true): string {
  if (points.length === 0) return "";
  const [head, ...rest] = points;
  const parts = [`M ${fmt(head[0])} ${fmt(head[1])}`];
  for (const [x, y] of rest) parts.push(`L ${fmt(x)} ${fmt(y)}`);
  if (close) parts.push("Z");
  return parts.join(" ");
}

export function renderSilhouette(
  points: Point[],
  viewport: Viewport,
  cssClass = "silhouette",
): string {
  if (points.length < 3) {
    return errorCard(viewport, "not enough points to draw");
  }
  const path = svgPath(project(points, fitTransform(points, viewport)));
  return (
    `<svg class="${cssClass}" viewBox="0 0 ${viewport.width} ${viewport.height}" ` +
    `width="${viewport.width}" height="${viewport.height}">` +
    `<path d="${path}" fill="none" stroke="currentColor" stroke-width="1.5"/>` +
    `</svg>`
  );
}

export function errorCard(viewport: Viewport, message: string): string {
  return (
    `<svg class="silhouette error" viewBox="0 0 ${viewport.width} ${viewport.height}" ` +
    `width="${viewport.width}" height="${viewport.height}">` +
    `<text x="${viewport.width / 2}" y="${viewport.height / 2}" ` +
    `text-anchor="middle">${message}</text>` +
    `</svg>`
  );
}

function isMalformed(individual: IndividualPayload): boolean {
  if (!Array.isArray(individual.points) || individual.points.length < 3) {
    return true;
  }
  return individual.points.some(
    (p) =>
      !Array.isArray(p) ||
      p.length !== 2 ||
      !Number.isFinite(p[0]) ||
      !Number.isFinite(p[1]),
  );
}

export const FITNESS_LEVELS = [0, 1, 2, 3, 4, 5, 6] as const;

export function renderIndividualCard(
  individual: IndividualPayload,
  viewport: Viewport = CARD_VIEWPORT,
): string {
  const shape = isMalformed(individual)
    ? errorCard(viewport, "malformed individual payload")
    : renderSilhouette(individual.points, viewport);
  const buttons = FITNESS_LEVELS.map((level) => {
    const selected = individual.fitness === level ? " selected" : "";
    return (
      `<button class="grade${selected}" data-individual="${individual.id}" ` +
      `data-fitness="${level}">${level}</button>`
    );
  }).join("");
  return (
    `<div class="card" data-individual="${individual.id}">` +
    shape +
    `<div class="grades">${buttons}</div>` +
    `</div>`
  );
}
