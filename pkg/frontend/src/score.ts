/** Post-game score screen: grouped bars of the eight scaled indicators,
 * the raw-value table, and the cash-flow timeline. Values are plotted
 * verbatim; the bar axis is clamped to [0, 100]. */

import { projectScore, ScoreModel, SEAT_COLORS } from "./model.js";
import { INDICATOR_FIELDS, ReportDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const FIELD_LABELS: Record<string, string> = {
  tree_biomass_carbon: "Tree biomass C",
  total_soil_carbon: "Soil C",
  ecosystem_carbon: "Ecosystem C",
  wood_products_carbon: "Wood products C",
  timber: "Timber",
  deadwood: "Deadwood",
  soil_water: "Soil water",
  net_present_value: "NPV",
};

export function renderScore(root: HTMLElement, report: ReportDoc, startCash = 8000): void {
  const model = projectScore(report, startCash);
  root.innerHTML = "";
  const heading = document.createElement("h2");
  heading.textContent = `Outcome comparison (scaled 1–100, ${model.source})`;
  root.appendChild(heading);
  root.appendChild(renderBars(model));
  root.appendChild(renderRawTable(model));
  root.appendChild(renderTimeline(model));
}

function renderBars(model: ScoreModel): SVGSVGElement {
  const groupWidth = 70;
  const barWidth = Math.max(8, Math.floor(48 / model.players.length));
  const chartHeight = 160;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "score-bars");
  svg.setAttribute("width", String(INDICATOR_FIELDS.length * groupWidth + 40));
  svg.setAttribute("height", String(chartHeight + 50));
  svg.dataset.axisMax = String(model.axisMax);

  for (const [f, field] of INDICATOR_FIELDS.entries()) {
    const bars = model.bars.filter((b) => b.field === field);
    bars.forEach((bar, i) => {
      const clamped = Math.max(0, Math.min(model.axisMax, bar.scaled));
      const height = (clamped / model.axisMax) * chartHeight;
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(30 + f * groupWidth + i * barWidth));
      rect.setAttribute("y", String(chartHeight - height + 10));
      rect.setAttribute("width", String(barWidth - 2));
      rect.setAttribute("height", String(height));
      rect.setAttribute("fill", SEAT_COLORS[i % SEAT_COLORS.length]);
      rect.dataset.field = bar.field;
      rect.dataset.player = bar.player;
      rect.dataset.scaled = String(bar.scaled);
      svg.appendChild(rect);
    });
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(30 + f * groupWidth));
    label.setAttribute("y", String(chartHeight + 30));
    label.setAttribute("class", "bar-label");
    label.textContent = FIELD_LABELS[field] ?? field;
    svg.appendChild(label);
  }
  return svg;
}

function renderRawTable(model: ScoreModel): HTMLElement {
  const table = document.createElement("table");
  table.className = "raw-table";
  const head = document.createElement("thead");
  const headRow = document.createElement("tr");
  headRow.appendChild(cellOf("Indicator", "th"));
  for (const player of model.players) {
    headRow.appendChild(cellOf(player, "th"));
  }
  head.appendChild(headRow);
  table.appendChild(head);
  const body = document.createElement("tbody");
  for (const row of model.rawRows) {
    const tr = document.createElement("tr");
    tr.dataset.field = row.field;
    tr.appendChild(cellOf(FIELD_LABELS[row.field] ?? row.field));
    for (const value of row.values) {
      const cell = cellOf(formatValue(value));
      cell.dataset.raw = String(value);
      tr.appendChild(cell);
    }
    body.appendChild(tr);
  }
  table.appendChild(body);
  return table;
}

function cellOf(text: string, tag: "td" | "th" = "td"): HTMLElement {
  const cell = document.createElement(tag);
  cell.textContent = text;
  return cell;
}

function renderTimeline(model: ScoreModel): SVGSVGElement {
  const width = 360;
  const height = 140;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "cash-timeline");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  const balances = model.cashTimeline.flatMap((t) => t.points.map((p) => p.balance));
  const hi = Math.max(1, ...balances);
  const lo = Math.min(0, ...balances);
  model.cashTimeline.forEach((track, i) => {
    const path = document.createElementNS(SVG_NS, "polyline");
    const coords = track.points
      .map((p, idx) => {
        const x = 20 + (idx / Math.max(1, track.points.length - 1)) * (width - 40);
        const y = height - 20 - ((p.balance - lo) / (hi - lo)) * (height - 40);
        return `${x.toFixed(1)},${y.toFixed(1)}`;
      })
      .join(" ");
    path.setAttribute("points", coords);
    path.setAttribute("fill", "none");
    path.setAttribute("stroke", SEAT_COLORS[i % SEAT_COLORS.length]);
    path.dataset.player = track.player;
    svg.appendChild(path);
  });
  return svg;
}

function formatValue(value: number): string {
  if (Number.isInteger(value)) return String(value);
  return value.toFixed(2);
}
