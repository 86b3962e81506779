/** Risk-card reveal modals, shown one per drawn card in stream order. */

import { CardReveal } from "./model.js";
import { CardTexts, SessionView } from "./types.js";

export interface RevealImpact {
  affected: number[]; // parcels the card touched
  protectedByInsurance: number[]; // parcels insurance spared
  global: boolean; // market cards touch prices, not parcels
}

/** Which of the drawer's parcels a card touches, and which insurance spared. */
export function revealImpact(
  session: SessionView | null,
  card: string,
  player: number,
  phase: string,
): RevealImpact {
  const none: RevealImpact = { affected: [], protectedByInsurance: [], global: false };
  if (card === "price_up" || card === "price_down") {
    return { ...none, global: true };
  }
  const state = session?.state;
  if (!state) return none;
  const mine = state.parcels.filter((p) => p.manager === player && p.species !== null);
  const targets = mine.filter((p) => {
    if (card === "beetle" || card === "root_rot") return p.species === "spruce";
    if (card === "mammal") {
      return phase === "risk_0" && (p.species === "pine" || p.species === "birch");
    }
    return true; // storm threatens every planted parcel
  });
  const insurable = card !== "mammal"; // grazing is not covered
  return {
    affected: targets.filter((p) => !(insurable && p.insured)).map((p) => p.id),
    protectedByInsurance: insurable ? targets.filter((p) => p.insured).map((p) => p.id) : [],
    global: false,
  };
}

export class RiskRevealQueue {
  private queue: CardReveal[] = [];
  private shownSeq = 0;
  private current: HTMLElement | null = null;

  constructor(
    private root: HTMLElement,
    private cardTexts: CardTexts,
    private playerName: (id: number) => string,
    private sessionProvider: () => SessionView | null = () => null,
  ) {}

  /** Enqueue reveals newer than anything shown; display follows seq order. */
  push(reveals: CardReveal[]): void {
    for (const reveal of reveals) {
      if (reveal.seq > this.shownSeq && !this.queue.some((r) => r.seq === reveal.seq)) {
        this.queue.push(reveal);
      }
    }
    this.queue.sort((a, b) => a.seq - b.seq);
    this.showNext();
  }

  dismiss(): void {
    this.current?.remove();
    this.current = null;
    this.showNext();
  }

  get pending(): number {
    return this.queue.length + (this.current ? 1 : 0);
  }

  private showNext(): void {
    if (this.current || !this.queue.length) return;
    const reveal = this.queue.shift()!;
    this.shownSeq = reveal.seq;
    const modal = document.createElement("div");
    modal.className = "risk-modal";
    modal.dataset.card = reveal.card;
    modal.dataset.seq = String(reveal.seq);
    const text = this.cardTexts[reveal.card] ?? { title: reveal.card, body: "" };
    const title = document.createElement("h2");
    title.textContent = text.title;
    const who = document.createElement("p");
    who.className = "risk-player";
    who.textContent = `Drawn by ${this.playerName(reveal.player)}`;
    const body = document.createElement("p");
    body.textContent = text.body;
    modal.append(title, who, body);
    modal.appendChild(this.renderImpact(reveal));
    const button = document.createElement("button");
    button.textContent = "Continue";
    button.onclick = () => this.dismiss();
    modal.appendChild(button);
    this.root.appendChild(modal);
    this.current = modal;
  }

  private renderImpact(reveal: CardReveal): HTMLElement {
    const impact = revealImpact(this.sessionProvider(), reveal.card, reveal.player, reveal.phase);
    const line = document.createElement("p");
    line.className = "risk-impact";
    line.dataset.affected = impact.affected.join(",");
    line.dataset.protected = impact.protectedByInsurance.join(",");
    if (impact.global) {
      line.textContent = "Affects timber prices for all players.";
    } else if (!impact.affected.length && !impact.protectedByInsurance.length) {
      line.textContent = "No parcels affected.";
    } else {
      const parts: string[] = [];
      if (impact.affected.length) {
        parts.push(`Affected parcels: ${impact.affected.join(", ")}`);
      }
      if (impact.protectedByInsurance.length) {
        parts.push(`Protected by insurance: ${impact.protectedByInsurance.join(", ")}`);
      }
      line.textContent = parts.join(" · ");
    }
    return line;
  }
}
