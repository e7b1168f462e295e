/** Browser bootstrap: wires the view model to the page.
 *
 * Everything DOM- or WebSocket-specific lives here, in one thin file;
 * the testable logic sits in viewmodel.ts / render.ts / a1.ts.
 */

import { parseAddr, parseRange, renderRange, type Rect } from "./a1.js";
import { chartPanelHtml, explainHtml, formulaBarHtml, gridHtml, statusHtml } from "./render.js";
import { WsTransport, type SocketLike } from "./transport.js";
import { GridViewModel } from "./viewmodel.js";

const VIEW: Rect = parseRange("A1:J20");

function wsUrl(): string {
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${location.host}/session`;
}

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node;
}

async function boot(): Promise<void> {
  const transport = new WsTransport(
    () => new WebSocket(wsUrl()) as unknown as SocketLike,
  );
  const vm = new GridViewModel(transport);

  const grid = el("grid");
  const bar = el("formula-bar");
  const status = el("status");
  const trace = el("trace");
  const chart = el("chart");

  const repaint = (): void => {
    grid.innerHTML = gridHtml(vm, VIEW);
    bar.innerHTML = formulaBarHtml(vm);
    status.innerHTML = statusHtml(vm);
    bindEntryBox();
  };
  vm.onRepaint(repaint);

  let dragging = false;

  grid.addEventListener("mousedown", (ev) => {
    const addr = cellAddr(ev.target);
    if (!addr) {
      return;
    }
    if ((ev as MouseEvent).shiftKey) {
      dragging = true;
      return;
    }
    vm.selectAddr(addr);
    repaint();
  });

  grid.addEventListener("mouseup", (ev) => {
    const addr = cellAddr(ev.target);
    if (dragging && addr) {
      dragging = false;
      void vm.fillDrag(parseAddr(addr));
    }
  });

  function bindEntryBox(): void {
    const input = document.getElementById("entry") as HTMLInputElement | null;
    if (!input) {
      return;
    }
    input.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") {
        void vm.setEntry(vm.cursorAddr, input.value);
      } else if (ev.key === "F1") {
        ev.preventDefault();
        void vm
          .explain(input.value, vm.cursorAddr)
          .then((t) => (trace.innerHTML = explainHtml(t)));
      }
    });
  }

  (el("chart-btn") as HTMLButtonElement).addEventListener("click", () => {
    const range = renderRange(vm.selection);
    void vm
      .buildChart({
        kind: "bar",
        title: range,
        series: [{ name: range, range }],
      })
      .then((payload) => {
        chart.innerHTML = chartPanelHtml(payload.svg, payload.lint);
      })
      .catch((err: Error) => {
        chart.textContent = String(err.message);
      });
  });

  transport.onDisconnect = () => {
    status.textContent = "disconnected — reconnecting...";
    setTimeout(() => {
      void transport
        .connect()
        .then(() => vm.resync(renderRange(VIEW)))
        .catch(() => (status.textContent = "engine unreachable"));
    }, 500);
  };

  await transport.connect();
  await vm.resync(renderRange(VIEW));
}

function cellAddr(target: EventTarget | null): string | null {
  const td = (target as HTMLElement | null)?.closest?.("td[data-addr]");
  return td?.getAttribute("data-addr") ?? null;
}

void boot();
