/**
 * Theme explorer contract tests: coverage gauge fidelity, per-tag spread,
 * pair-evidence drill-down with an explicit empty state.
 */

import { describe, expect, test } from "vitest";
import { ApiClient } from "../src/api.js";
import { ThemeController } from "../src/controllers.js";
import { buildThemeView } from "../src/viewmodels.js";
import type { PairEvidenceResponse, ThemesResponse } from "../src/types.js";
import { FakeServer, fixture } from "./helpers.js";

const themes = fixture<ThemesResponse>("themes.json");
const pair = fixture<PairEvidenceResponse>("theme_pair.json");
const emptyPair = fixture<PairEvidenceResponse>("theme_pair_empty.json");

describe("theme view model", () => {
	test("coverage gauge shows the report's achieved coverage exactly", () => {
		const view = buildThemeView(themes.report);
		expect(view.gauge.value).toBe(themes.report.coverage);
		expect(view.gauge.target).toBe(themes.report.coverage_target);
		expect(view.gauge.reached).toBe(
			themes.report.coverage >= themes.report.coverage_target,
		);
	});

	test("rows mirror the ranked terms with their support counts", () => {
		const view = buildThemeView(themes.report);
		expect(view.rows.map((r) => r.phrase)).toEqual(
			themes.report.terms.map((t) => t.phrase),
		);
		for (const [i, row] of view.rows.entries()) {
			const term = themes.report.terms[i]!;
			expect(row.fusedRank).toBe(term.fused_rank);
			expect(row.ticketCount).toBe(term.supporting_tickets.length);
			for (const { method, value } of row.scores) {
				expect(value).toBe(term.method_scores[method]);
			}
		}
	});

	test("spread rows carry the per-tag fractions verbatim", () => {
		const view = buildThemeView(themes.report);
		for (const row of view.spread) {
			expect(row.fraction).toBe(themes.report.spread[row.tag]);
		}
		expect(view.spread.map((r) => r.tag).sort()).toEqual(
			Object.keys(themes.report.spread).sort(),
		);
	});
});

describe("pair evidence drill-down", () => {
	test("clicking a pair lists exactly the evidence tickets", async () => {
		const [p, q] = pair.evidence.phrases;
		const params = new URLSearchParams({ p, q });
		const server = new FakeServer()
			.on("POST", "/themes", themes)
			.on("GET", "/themes/pair", pair);
		const controller = new ThemeController(new ApiClient("http://fake", server.fetch));

		await controller.selectPair(p, q);
		expect(controller.state.evidenceStatus).toBe("done");
		expect(controller.state.evidence!.state).toBe("list");
		expect(controller.state.evidence!.ticketIds).toEqual(pair.evidence.ticket_ids);
		expect(controller.state.evidence!.count).toBe(pair.evidence.count);
		expect(params.get("p")).toBe(p); // query carried the exact phrases
	});

	test("a never-co-occurring pair renders the explicit empty state", async () => {
		const server = new FakeServer().on("GET", "/themes/pair", emptyPair);
		const controller = new ThemeController(new ApiClient("http://fake", server.fetch));
		const [p, q] = emptyPair.evidence.phrases;

		await controller.selectPair(p, q);
		expect(controller.state.evidence!.state).toBe("empty");
		expect(controller.state.evidence!.ticketIds).toEqual([]);
	});

	test("running a report builds the view from the response", async () => {
		const server = new FakeServer().on("POST", "/themes", themes);
		const controller = new ThemeController(new ApiClient("http://fake", server.fetch));
		await controller.run({ method: "LSA+TF", seed: 4, tag_field: "module_tag" });
		expect(controller.state.status).toBe("done");
		expect(controller.state.view!.method).toBe(themes.report.method);
	});
});
