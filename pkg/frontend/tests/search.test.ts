/**
 * Search screen contract tests against recorded /search responses:
 * four band sections, score traceability, filter hierarchy, stale
 * response discard, non-blocking error banner.
 */

import { describe, expect, test } from "vitest";
import { ApiClient } from "../src/api.js";
import { SearchController } from "../src/controllers.js";
import { BAND_ORDER, buildFilterWidgets, buildSearchView } from "../src/viewmodels.js";
import type { ConfigResponse, SearchResponse } from "../src/types.js";
import { FakeServer, failingFetch, fixture } from "./helpers.js";

const searchResponse = fixture<SearchResponse>("search.json");
const config = fixture<ConfigResponse>("config_fields.json");

describe("search view model", () => {
	test("renders the four band sections in order", () => {
		const view = buildSearchView(searchResponse);
		expect(view.sections.map((s) => s.band)).toEqual(BAND_ORDER);
		// the recorded fixture has at least one hit in every band
		for (const section of view.sections.slice(0, 3)) {
			expect(section.hits.length).toBeGreaterThan(0);
		}
	});

	test("every hit lands in the section matching its API band", () => {
		const view = buildSearchView(searchResponse);
		for (const section of view.sections) {
			for (const hit of section.hits) {
				expect(hit.band).toBe(section.band);
				expect(hit.color).toBe(section.color);
			}
		}
		const rendered = view.sections.reduce((n, s) => n + s.hits.length, 0);
		expect(rendered).toBe(searchResponse.hits.length);
	});

	test("every displayed score is a response field, never computed locally", () => {
		const view = buildSearchView(searchResponse);
		const responseScores = new Map(searchResponse.hits.map((h) => [h.ticket_id, h.score]));
		for (const section of view.sections) {
			for (const hit of section.hits) {
				expect(hit.score).toBe(responseScores.get(hit.ticketId));
				expect(hit.scoreText).toBe(responseScores.get(hit.ticketId)!.toFixed(4));
			}
		}
	});

	test("band boundaries come from the response's threshold echo", () => {
		const view = buildSearchView(searchResponse);
		const t = searchResponse.thresholds;
		expect(view.thresholds).toEqual(t);
		expect(view.sections[0]!.thresholdText).toContain(String(t.duplicate));
		expect(view.sections[3]!.thresholdText).toContain(String(t.related));
	});

	test("explain payload is carried through for drill-down", () => {
		const view = buildSearchView(searchResponse);
		const top = view.sections[0]!.hits[0]!;
		expect(top.explain.length).toBeGreaterThan(0);
		const fromResponse = searchResponse.hits.find((h) => h.ticket_id === top.ticketId)!;
		expect(top.explain).toEqual(fromResponse.explain);
	});
});

describe("filter hierarchy", () => {
	test("widgets render in filter_level order", () => {
		const widgets = buildFilterWidgets(config.fields, {});
		expect(widgets.map((w) => w.name)).toEqual(["module_tag", "region"]);
		expect(widgets.map((w) => w.level)).toEqual([1, 2]);
	});

	test("level 2 is disabled until level 1 has a value", () => {
		let widgets = buildFilterWidgets(config.fields, {});
		expect(widgets.find((w) => w.name === "region")!.enabled).toBe(false);
		widgets = buildFilterWidgets(config.fields, { module_tag: "web" });
		expect(widgets.find((w) => w.name === "region")!.enabled).toBe(true);
	});

	test("controller refuses out-of-order selection and cascades resets", () => {
		const controller = new SearchController(
			new ApiClient("http://fake", new FakeServer().fetch),
			config.fields,
		);
		expect(controller.setFilter("region", "emea")).toBe(false);
		expect(controller.state.filterValues).toEqual({});

		expect(controller.setFilter("module_tag", "web")).toBe(true);
		expect(controller.setFilter("region", "emea")).toBe(true);
		expect(controller.state.filterValues).toEqual({ module_tag: "web", region: "emea" });

		// changing the level-1 value clears the deeper selection
		expect(controller.setFilter("module_tag", "billing")).toBe(true);
		expect(controller.state.filterValues).toEqual({ module_tag: "billing" });
		expect(controller.state.widgets.find((w) => w.name === "region")!.value).toBe("");
	});
});

describe("search controller", () => {
	test("service down shows a non-blocking banner and preserves inputs", async () => {
		const controller = new SearchController(
			new ApiClient("http://fake", failingFetch("service down")),
			config.fields,
		);
		const inputs = { text: "login failure", dateFrom: "", dateTo: "", k: 10 };
		await controller.runSearch(inputs);
		expect(controller.state.status).toBe("error");
		expect(controller.state.banner).toContain("service down");
		expect(controller.state.inputs).toEqual(inputs); // still editable as typed
	});

	test("stale responses are discarded by sequence number", async () => {
		let release!: () => void;
		const gate = new Promise<void>((resolve) => (release = resolve));
		const slowThenFast: typeof fetch = async (url, init) => {
			const body = JSON.parse((init?.body as string) ?? "{}");
			if (body.text === "slow") {
				await gate;
				return new Response(JSON.stringify({ ...searchResponse, hits: [] }), { status: 200 });
			}
			return new Response(JSON.stringify(searchResponse), { status: 200 });
		};
		const controller = new SearchController(
			new ApiClient("http://fake", slowThenFast),
			config.fields,
		);
		const first = controller.runSearch({ text: "slow", dateFrom: "", dateTo: "", k: 10 });
		const second = controller.runSearch({ text: "fast", dateFrom: "", dateTo: "", k: 10 });
		await second;
		release();
		await first;
		// the late "slow" response must not overwrite the newer view
		expect(controller.state.view!.totalHits).toBe(searchResponse.hits.length);
		expect(controller.state.inputs.text).toBe("fast");
	});
});
