import { describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { SessionModel } from "../src/model.js";
import { cassetteFetch, listReplayCassettes, loadCassette } from "./cassette.js";
import type { SessionView } from "../src/types.js";

/**
 * Fifty recorded sessions with randomized value sequences.  For each one
 * the model replays the cassette and every displayed number must equal the
 * server-reported one; the history may only ever grow.
 */
describe("randomized replay scripts", () => {
  const names = listReplayCassettes();

  it("has the full set of scripts", () => {
    expect(names).toHaveLength(50);
  });

  for (const name of names) {
    it(`${name}: rendered sums equal API sums`, async () => {
      const cassette = loadCassette(name);
      const fetchFn = cassetteFetch(cassette);
      const model = new SessionModel(new ApiClient("", fetchFn));
      const views = cassette.exchanges
        .filter(
          (e) => e.request.method === "GET" && !e.request.path.includes("whatif"),
        )
        .map((e) => e.response.json as SessionView);

      const createView = views[0];
      let rendered = await model.create(createView.n_qubits);
      expect(rendered.sum).toBe(createView.sum);

      let previousRows = 0;
      for (let k = 1; k < views.length; k += 1) {
        const serverView = views[k];
        const recordedValue =
          serverView.history[serverView.history.length - 1].value;
        rendered = await model.recordValue(recordedValue);

        expect(rendered.error).toBeNull();
        expect(rendered.sum).toBe(serverView.sum);
        expect(rendered.status).toBe(serverView.status);
        expect(rendered.nextSetting).toBe(serverView.next_setting);
        expect(rendered.rows.length).toBe(serverView.history.length);
        expect(rendered.rows.length).toBeGreaterThan(previousRows);
        previousRows = rendered.rows.length;
        rendered.rows.forEach((row, i) => {
          expect(row.sum).toBe(serverView.history[i].sum);
          expect(row.setting).toBe(serverView.history[i].setting);
        });
        expect(rendered.progress).toBeCloseTo(Math.min(serverView.sum, 1), 12);
        if (serverView.status !== "running") {
          expect(rendered.banner).not.toBeNull();
          expect(rendered.whatifEnabled).toBe(false);
        }
      }
      expect(fetchFn.remaining()).toBe(0);
    });
  }
});
