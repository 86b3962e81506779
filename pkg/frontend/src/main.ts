/** App wiring: lobby form, live board driven by the event stream, risk
 * reveals, and the score screen once the game finishes.
 *
 * The view is a pure projection of the latest state document; stream events
 * only tell the client when to refetch, which cards to reveal, and when the
 * report is ready. Reconnecting and resyncing therefore reproduces the
 * identical view.
 */

import { GameClient, subscribeEvents, ApiError, Subscription } from "./api.js";
import { renderBoard, showToast } from "./board.js";
import { cardReveals } from "./model.js";
import { RiskRevealQueue } from "./risk.js";
import { renderScore } from "./score.js";
import { CardTexts, SessionView, StreamEvent } from "./types.js";

interface AppState {
  gameId: string | null;
  token: string | null;
  seat: number | null;
  session: SessionView | null;
  selectedParcel: number | null;
  finished: boolean;
}

const client = new GameClient("");
const app: AppState = {
  gameId: null,
  token: null,
  seat: null,
  session: null,
  selectedParcel: null,
  finished: false,
};

let cardTexts: CardTexts = {};
let reveals: RiskRevealQueue | null = null;
let subscription: Subscription | null = null;

function $(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function refresh(): Promise<void> {
  if (!app.gameId) return;
  app.session = await client.state(app.gameId, app.token ?? undefined);
  render();
}

function render(): void {
  const root = $("screen");
  if (!app.session) return;
  if (app.finished) {
    client
      .report(app.gameId!)
      .then((report) => renderScore(root, report))
      .catch(() => showToast($("toasts"), "report not ready yet"));
    return;
  }
  if (!app.session.state) {
    root.innerHTML = `<p class="lobby-wait">Waiting for players… ${app.session.seats.length}/${app.session.players_expected}</p>`;
    return;
  }
  renderBoard(root, app.session, { onAction: submit }, app.selectedParcel);
  for (const cell of Array.from(root.querySelectorAll<HTMLElement>(".parcel"))) {
    cell.onclick = () => {
      app.selectedParcel = Number(cell.dataset.parcel);
      render();
    };
  }
}

async function submit(action: object): Promise<void> {
  try {
    await client.submit(app.gameId!, app.token!, action as never);
  } catch (error) {
    // The engine's reason string surfaces verbatim; nothing is applied
    // optimistically, so the board stays authoritative.
    const message = error instanceof ApiError ? error.message : String(error);
    showToast($("toasts"), message);
  }
  await refresh();
}

function onStreamEvent(event: StreamEvent): void {
  if (event.kind === "log") {
    if (event.event.type === "card_drawn" && reveals) {
      reveals.push(cardReveals([event]));
    }
  }
  if (event.kind === "finished") {
    app.finished = true;
  }
  void refresh();
}

async function joinGame(gameId: string, name: string): Promise<void> {
  const joined = await client.join(gameId, name);
  app.gameId = gameId;
  app.token = joined.token;
  app.seat = joined.seat;
  app.finished = false;
  cardTexts = await client.cardTexts();
  reveals = new RiskRevealQueue(
    $("modals"),
    cardTexts,
    (id) => app.session?.state?.players[id]?.name ?? `Player ${id + 1}`,
    () => app.session,
  );
  subscription?.close();
  subscription = subscribeEvents(client, gameId, onStreamEvent);
  window.location.hash = `#/game/${gameId}`;
  await refresh();
}

function wireLobby(): void {
  const createButton = $("create-game") as HTMLButtonElement;
  createButton.onclick = async () => {
    const players = Number(($("player-count") as HTMLInputElement).value) || 2;
    const name = ($("display-name") as HTMLInputElement).value || "Host";
    try {
      const created = await client.createGame({ players });
      ($("game-id") as HTMLInputElement).value = created.id;
      await joinGame(created.id, name);
    } catch (error) {
      showToast($("toasts"), String(error));
    }
  };
  const joinButton = $("join-game") as HTMLButtonElement;
  joinButton.onclick = async () => {
    const gameId = ($("game-id") as HTMLInputElement).value.trim();
    const name = ($("display-name") as HTMLInputElement).value || "Guest";
    if (!gameId) {
      showToast($("toasts"), "enter a game id");
      return;
    }
    try {
      await joinGame(gameId, name);
    } catch (error) {
      const message = error instanceof ApiError ? error.message : String(error);
      showToast($("toasts"), message);
    }
  };
}

if (typeof document !== "undefined" && document.getElementById("create-game")) {
  wireLobby();
}
