// SVG renderers. They emit plain markup strings; interactivity is attached by
// the app through event delegation on data-index attributes.

import type { ScatterModel, TourModel } from "./viewmodel.js";

const esc = (v: string | number) => String(v);

export function renderScatter(m: ScatterModel): string {
  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${m.width} ${m.height}" class="scatter" role="img" aria-label="pareto front">`,
  );
  for (const t of m.xTicks) {
    parts.push(
      `<line x1="${esc(t.px)}" y1="${m.height - 40}" x2="${esc(t.px)}" y2="${m.height - 36}" class="tick"/>`,
      `<text x="${esc(t.px)}" y="${m.height - 22}" class="tick-label" text-anchor="middle">${t.label}</text>`,
    );
  }
  for (const t of m.yTicks) {
    parts.push(
      `<line x1="36" y1="${esc(t.py)}" x2="40" y2="${esc(t.py)}" class="tick"/>`,
      `<text x="32" y="${esc(t.py)}" class="tick-label" text-anchor="end" dominant-baseline="middle">${t.label}</text>`,
    );
  }
  parts.push(
    `<text x="${m.width / 2}" y="${m.height - 6}" class="axis-label" text-anchor="middle">tour length</text>`,
    `<text x="12" y="${m.height / 2}" class="axis-label" text-anchor="middle" transform="rotate(-90 12 ${m.height / 2})">unvisited</text>`,
  );
  if (m.upperBoundY !== null) {
    parts.push(
      `<line x1="40" y1="${esc(m.upperBoundY)}" x2="${m.width - 10}" y2="${esc(m.upperBoundY)}" class="ub-line" data-upper-bound="${m.upperBound}"/>`,
      `<text x="${m.width - 12}" y="${esc(m.upperBoundY - 4)}" class="ub-label" text-anchor="end">upper bound ${m.upperBound}</text>`,
    );
  }
  for (const p of m.clairvoyant) {
    parts.push(`<circle cx="${esc(p.px)}" cy="${esc(p.py)}" r="1.8" class="cl-point"/>`);
  }
  for (const p of m.points) {
    const cls = ["front-point", p.selected ? "selected" : "", p.previewed ? "previewed" : ""]
      .filter(Boolean)
      .join(" ");
    parts.push(
      `<circle cx="${esc(p.px)}" cy="${esc(p.py)}" r="5" class="${cls}" data-index="${p.index}">` +
        `<title>#${p.index}: length ${p.tourLength.toFixed(1)}, unvisited ${p.unvisited}</title></circle>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

const KIND_CLASS: Record<string, string> = {
  SD: "marker-depot",
  ED: "marker-depot",
  M: "marker-mandatory",
  D: "marker-dynamic",
};

export function renderTourMap(m: TourModel): string {
  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${m.width} ${m.height}" class="tour-map" role="img" aria-label="tour map">`,
  );
  if (m.plannedPath.length > 1) {
    const d = m.plannedPath.map((p) => `${p.px},${p.py}`).join(" ");
    parts.push(`<polyline points="${d}" class="planned-path"/>`);
  }
  if (m.committedPath.length > 1) {
    const d = m.committedPath.map((p) => `${p.px},${p.py}`).join(" ");
    parts.push(`<polyline points="${d}" class="committed-path"/>`);
  }
  for (const mk of m.markers) {
    const cls = [
      KIND_CLASS[mk.kind] ?? "marker-mandatory",
      mk.appeared ? "appeared" : "pending",
      mk.committed ? "committed" : "",
    ]
      .filter(Boolean)
      .join(" ");
    parts.push(
      `<circle cx="${esc(mk.px)}" cy="${esc(mk.py)}" r="${mk.kind === "SD" || mk.kind === "ED" ? 6 : 4}" class="${cls}" data-id="${mk.id}">` +
        `<title>${mk.kind} ${mk.id}</title></circle>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
