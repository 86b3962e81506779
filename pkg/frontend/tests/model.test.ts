/** Pure projection layer, driven by a session recorded from the live service. */

import { describe, expect, it } from "vitest";

import {
  BOARD_COLUMNS,
  BOARD_ROWS,
  cardReveals,
  lastSeq,
  parcelActions,
  projectBoard,
  projectScore,
  SPECIES_COLOR,
  streamIsGapFree,
  tableActions,
} from "../src/model.js";
import { INDICATOR_FIELDS, SessionView, StreamEvent } from "../src/types.js";
import fixture from "./fixtures/session.json";

const steps = fixture.steps as { seat: number; action: any; view: SessionView }[];
const events = fixture.events as StreamEvent[];

describe("board projection", () => {
  it("always shows the full 40-parcel board", () => {
    for (const step of steps) {
      const model = projectBoard(step.view);
      expect(model.cells).toHaveLength(BOARD_COLUMNS * BOARD_ROWS);
    }
  });

  it("lays parcels out in an 8x5 grid by id", () => {
    const model = projectBoard(steps[0].view);
    expect(model.cells[0]).toMatchObject({ row: 0, column: 0 });
    expect(model.cells[7]).toMatchObject({ row: 0, column: 7 });
    expect(model.cells[8]).toMatchObject({ row: 1, column: 0 });
    expect(model.cells[39]).toMatchObject({ row: 4, column: 7 });
  });

  it("mirrors the service's pin counts verbatim after each action", () => {
    for (const step of steps) {
      const model = projectBoard(step.view);
      for (const parcel of step.view.state!.parcels) {
        const cell = model.cells[parcel.id];
        expect(cell.pins).toBe(parcel.pins);
        expect(cell.pins).toBeGreaterThanOrEqual(0);
        expect(cell.pins).toBeLessThanOrEqual(5);
      }
    }
  });

  it("a freshly planted parcel shows five pins in its species color", () => {
    const afterFirstPlant = steps[0].view;
    const model = projectBoard(afterFirstPlant);
    const cell = model.cells[0];
    expect(cell.pins).toBe(5);
    expect(cell.species).toBe("pine");
    expect(cell.speciesColor).toBe(SPECIES_COLOR.pine);
  });

  it("colors cells by managing player", () => {
    const model = projectBoard(steps[0].view);
    const seat0 = model.cells.filter((c) => c.parcel < 10);
    const seat1 = model.cells.filter((c) => c.parcel >= 10 && c.parcel < 20);
    const bank = model.cells.filter((c) => c.parcel >= 20);
    expect(new Set(seat0.map((c) => c.seatColor)).size).toBe(1);
    expect(new Set(seat1.map((c) => c.seatColor)).size).toBe(1);
    expect(seat0[0].seatColor).not.toBe(seat1[0].seatColor);
    for (const cell of bank) expect(cell.seatColor).toBeNull();
  });

  it("cash banner follows the service's books", () => {
    const model = projectBoard(steps[2].view); // after 2 plants + insurance
    expect(model.players[0].cash).toBe(8000 - 2000 - 500);
  });

  it("rebuild from the same document is identical (resync safety)", () => {
    const a = projectBoard(steps[5].view);
    const b = projectBoard(steps[5].view);
    expect(b).toEqual(a);
  });
});

describe("action panel projection", () => {
  it("renders exactly the actions the engine listed for a parcel", () => {
    const view = steps[5].view; // first thinning, seat 0's turn context
    const state = view.state!;
    const listed = (state.legal_actions ?? []).filter((a) => a.parcel === 0);
    const options = parcelActions(state, 0);
    expect(options.map((o) => o.action)).toEqual(listed);
  });

  it("keeps table-level actions (pass, lease accepts) separate", () => {
    const state = steps[0].view.state!;
    const options = tableActions(state);
    expect(options.some((o) => o.action.kind === "pass")).toBe(true);
    for (const option of options) {
      expect(option.action.parcel ?? null).toBeNull();
    }
  });

  it("never invents actions when none are listed", () => {
    const state = { ...steps[0].view.state!, legal_actions: [] };
    expect(parcelActions(state, 0)).toEqual([]);
    expect(tableActions(state)).toEqual([]);
  });
});

describe("event stream projection", () => {
  it("the recorded stream is gap-free from seq 1", () => {
    expect(streamIsGapFree(events)).toBe(true);
    expect(events[0].seq).toBe(1);
    expect(lastSeq(events)).toBe(events.length);
  });

  it("card reveals surface in stream order with phase and player", () => {
    const reveals = cardReveals(events);
    expect(reveals.length).toBeGreaterThan(0);
    const seqs = reveals.map((r) => r.seq);
    expect([...seqs].sort((a, b) => a - b)).toEqual(seqs);
    for (const reveal of reveals) {
      expect(reveal.phase.startsWith("risk_")).toBe(true);
      expect([0, 1]).toContain(reveal.player);
      expect(typeof reveal.card).toBe("string");
    }
  });

  it("resume after N skips already-seen reveals", () => {
    const all = cardReveals(events);
    const tail = cardReveals(events, all[0].seq);
    expect(tail).toEqual(all.slice(1));
  });
});

describe("score projection", () => {
  it("keeps the plotted values verbatim from the report", () => {
    const model = projectScore(fixture.report as any, 8000);
    for (const entry of (fixture.report as any).players) {
      for (const field of INDICATOR_FIELDS) {
        const bar = model.bars.find((b) => b.player === entry.name && b.field === field)!;
        expect(bar.scaled).toBe(entry.scaled[field]);
        expect(bar.raw).toBe(entry.raw[field]);
      }
    }
  });

  it("cash timeline starts at the initial allocation and ends at final cash", () => {
    const model = projectScore(fixture.report as any, 8000);
    for (const entry of (fixture.report as any).players) {
      const track = model.cashTimeline.find((t) => t.player === entry.name)!;
      expect(track.points[0].balance).toBe(8000);
      expect(track.points[track.points.length - 1].balance).toBe(entry.cash);
    }
  });
});
