import { ApiClient } from "./api.js";
import { RenderModel, SessionModel } from "./model.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function draw(m: RenderModel): void {
  el("setup").style.display = m.phase === "setup" ? "block" : "none";
  el("session").style.display = m.phase === "session" ? "block" : "none";
  el("error").textContent = m.error ?? "";
  el("error").style.display = m.error ? "block" : "none";
  if (m.phase === "setup") {
    return;
  }
  el("session-id").textContent = m.sessionId ?? "";
  el("badge").textContent = (m.status ?? "").toUpperCase();
  el("badge").className = `badge ${m.status}`;
  el("sum").textContent = m.sum.toFixed(3);
  el<HTMLDivElement>("bar").style.width = `${Math.round(100 * m.progress)}%`;
  el("next").textContent = m.nextSetting ?? "-";
  el("record-controls").style.display = m.nextSetting === null ? "none" : "block";

  const rows = m.rows
    .map(
      (r, i) =>
        `<tr><td>${i + 1}</td><td>${r.setting}</td><td>${r.value.toFixed(3)}</td>` +
        `<td>${r.stderr === null ? "" : r.stderr.toFixed(3)}</td><td>${r.sum.toFixed(3)}</td></tr>`,
    )
    .join("");
  el("history").innerHTML = rows;

  el("banner").textContent = m.banner ?? "";
  el("banner").style.display = m.banner ? "block" : "none";
  el<HTMLButtonElement>("whatif-go").disabled = !m.whatifEnabled;
  el("whatif-out").textContent = m.whatif
    ? `hypothetical sum ${m.whatif.sum.toFixed(3)} ` +
      (m.whatif.wouldDetect ? "- would detect" : "- still below threshold")
    : "";
}

export function wire(): void {
  const base = (el<HTMLInputElement>("api-base").value || "").replace(/\/$/, "");
  const model = new SessionModel(new ApiClient(base));

  el<HTMLButtonElement>("create").onclick = async () => {
    const n = Number(el<HTMLInputElement>("n-qubits").value);
    const rawThreshold = el<HTMLInputElement>("threshold").value;
    const threshold = rawThreshold === "" ? undefined : Number(rawThreshold);
    draw(await model.create(n, threshold));
  };

  el<HTMLButtonElement>("record").onclick = async () => {
    const value = Number(el<HTMLInputElement>("value").value);
    const rawErr = el<HTMLInputElement>("stderr").value;
    const stderr = rawErr === "" ? undefined : Number(rawErr);
    draw(await model.recordValue(value, stderr));
    el<HTMLInputElement>("value").value = "";
  };

  el<HTMLButtonElement>("whatif-go").onclick = async () => {
    const value = Number(el<HTMLInputElement>("whatif-value").value);
    draw(await model.exploreWhatif(value));
  };

  el<HTMLButtonElement>("refresh").onclick = async () => {
    draw(await model.refresh());
  };

  draw(model.render());
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  wire();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", wire);
}
