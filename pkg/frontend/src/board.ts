/** Board screen: the 8x5 parcel grid, cash/phase banner, and action panel. */

import {
  ActionOption,
  BoardModel,
  parcelActions,
  projectBoard,
  tableActions,
} from "./model.js";
import { ActionDoc, SessionView, Species } from "./types.js";

export interface BoardHandlers {
  onAction(action: ActionDoc): void;
}

const SPECIES_CHOICES: Species[] = ["pine", "spruce", "birch"];

export function renderBoard(
  root: HTMLElement,
  session: SessionView,
  handlers: BoardHandlers,
  selectedParcel: number | null = null,
): void {
  const model = projectBoard(session);
  root.innerHTML = "";
  root.appendChild(renderBanner(model));
  root.appendChild(renderGrid(model, session, handlers, selectedParcel));
  if (selectedParcel !== null && session.state) {
    root.appendChild(renderActionPanel(session, selectedParcel, handlers));
  }
  const table = renderTablePanel(session, handlers);
  if (table) root.appendChild(table);
}

function renderBanner(model: BoardModel): HTMLElement {
  const banner = el("header", "banner");
  const phase = el("div", "banner-phase");
  phase.textContent = `${model.phaseLabel} (year ${model.year})`;
  banner.appendChild(phase);
  const market = el("div", "banner-market");
  const sign = model.priceModifier > 0 ? "+" : "";
  market.textContent = `market ${sign}${model.priceModifier} €/m³ · deck ${model.deckRemaining}`;
  banner.appendChild(market);
  for (const player of model.players) {
    const chip = el("div", "banner-player");
    chip.style.background = player.color;
    chip.textContent = `${player.name} €${player.cash}${player.passed ? " ✓" : ""}`;
    banner.appendChild(chip);
  }
  return banner;
}

function renderGrid(
  model: BoardModel,
  session: SessionView,
  handlers: BoardHandlers,
  selected: number | null,
): HTMLElement {
  const grid = el("div", "board");
  grid.dataset.parcels = String(model.cells.length);
  for (const cell of model.cells) {
    const node = el("div", "parcel");
    node.dataset.parcel = String(cell.parcel);
    if (cell.seatColor) node.style.background = cell.seatColor;
    if (cell.parcel === selected) node.classList.add("selected");
    if (cell.insured) node.classList.add("insured");
    if (cell.decided) node.dataset.decided = cell.decided;
    const pins = el("div", "pins");
    for (let i = 0; i < cell.pins; i++) {
      const pin = el("span", `pin pin-${cell.species ?? "none"}`);
      if (cell.speciesColor) pin.style.background = cell.speciesColor;
      pins.appendChild(pin);
    }
    node.appendChild(pins);
    const label = el("div", "parcel-label");
    label.textContent = cell.managerName ? `${cell.parcel} · ${cell.managerName}` : `${cell.parcel}`;
    node.appendChild(label);
    grid.appendChild(node);
  }
  return grid;
}

function renderActionPanel(
  session: SessionView,
  parcel: number,
  handlers: BoardHandlers,
): HTMLElement {
  const panel = el("aside", "action-panel");
  panel.dataset.parcel = String(parcel);
  const title = el("h3");
  title.textContent = `Parcel ${parcel}`;
  panel.appendChild(title);
  const options = parcelActions(session.state!, parcel);
  if (!options.length) {
    const none = el("p", "no-actions");
    none.textContent = "No actions available";
    panel.appendChild(none);
    return panel;
  }
  for (const option of options) {
    panel.appendChild(renderOption(option, handlers));
  }
  return panel;
}

function renderTablePanel(session: SessionView, handlers: BoardHandlers): HTMLElement | null {
  if (!session.state?.legal_actions) return null;
  const options = tableActions(session.state);
  if (!options.length) return null;
  const panel = el("aside", "table-panel");
  for (const option of options) {
    panel.appendChild(renderOption(option, handlers));
  }
  return panel;
}

function renderOption(option: ActionOption, handlers: BoardHandlers): HTMLElement {
  const wrap = el("div", "action-option");
  let species: Species = (option.action.species as Species) ?? "pine";
  let price = option.action.price ?? 0;
  if (option.needsSpecies) {
    const select = document.createElement("select");
    select.className = "species-select";
    for (const choice of SPECIES_CHOICES) {
      const item = document.createElement("option");
      item.value = choice;
      item.textContent = choice;
      select.appendChild(item);
    }
    select.value = species;
    select.onchange = () => (species = select.value as Species);
    wrap.appendChild(select);
  }
  if (option.needsPrice) {
    const input = document.createElement("input");
    input.type = "number";
    input.min = "0";
    input.value = String(price);
    input.className = "price-input";
    input.onchange = () => (price = Math.max(0, Number(input.value) || 0));
    wrap.appendChild(input);
  }
  const button = document.createElement("button");
  button.textContent = option.label;
  button.dataset.kind = option.action.kind;
  button.onclick = () => {
    const action: ActionDoc = { ...option.action };
    delete action.actor; // the service stamps the actor from the token
    if (option.needsSpecies) action.species = species;
    if (option.needsPrice) action.price = price;
    handlers.onAction(action);
  };
  wrap.appendChild(button);
  return wrap;
}

export function showToast(root: HTMLElement, message: string): void {
  const toast = el("div", "toast");
  toast.textContent = message;
  root.appendChild(toast);
  setTimeout(() => toast.remove(), 4000);
}

function el(tag: string, className?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  return node;
}
