/**
 * Console bootstrap: wires the controllers to the page sections.
 * The service base URL comes from ?api=... or defaults to same-origin.
 */

import { ApiClient } from "./api.js";
import {
	ConfigController,
	RecommendationController,
	SearchController,
	ThemeController,
} from "./controllers.js";
import { renderConfig, renderFilters, renderRecommendations, renderSearch, renderThemes } from "./dom.js";

function need(id: string): HTMLElement {
	const node = document.getElementById(id);
	if (!node) throw new Error(`missing #${id}`);
	return node;
}

async function boot(): Promise<void> {
	const params = new URLSearchParams(window.location.search);
	const api = new ApiClient(params.get("api") ?? "");

	const configController = new ConfigController(api, (state) =>
		renderConfig(need("config"), state),
	);
	await configController.load();

	const searchController = new SearchController(api, configController.state.fields, (state) => {
		renderFilters(need("filters"), state, (name, value) => searchController.setFilter(name, value));
		renderSearch(need("results"), state, () => {});
	});
	renderFilters(need("filters"), searchController.state, (name, value) =>
		searchController.setFilter(name, value),
	);

	need("search-form").addEventListener("submit", (event) => {
		event.preventDefault();
		const text = (need("query") as HTMLInputElement).value;
		const dateFrom = (need("date-from") as HTMLInputElement).value;
		const dateTo = (need("date-to") as HTMLInputElement).value;
		void searchController.runSearch({
			text,
			dateFrom: dateFrom ? `${dateFrom}T00:00:00Z` : "",
			dateTo: dateTo ? `${dateTo}T23:59:59Z` : "",
			k: 20,
		});
	});

	const ticketId = params.get("ticket") ?? "console-ticket";
	const recommendController = new RecommendationController(api, ticketId, (state) =>
		renderRecommendations(need("recommendations"), state, (label, verdict) => {
			void recommendController.submitVerdict(label, verdict);
		}),
	);
	need("recommend-form").addEventListener("submit", (event) => {
		event.preventDefault();
		const summary = (need("recommend-summary") as HTMLInputElement).value;
		const target = (need("recommend-target") as HTMLSelectElement).value as
			| "assignee"
			| "business-process";
		const seedRaw = (need("recommend-seed") as HTMLInputElement).value;
		void recommendController.load(target, {
			ticket: { summary },
			train: seedRaw ? { seed: Number(seedRaw) } : undefined,
		});
	});

	const themeController = new ThemeController(api, (state) =>
		renderThemes(need("themes"), state, (p, q) => void themeController.selectPair(p, q)),
	);
	need("themes-form").addEventListener("submit", (event) => {
		event.preventDefault();
		const method = (need("theme-method") as HTMLSelectElement).value;
		const seed = Number((need("theme-seed") as HTMLInputElement).value || "0");
		const tagField = (need("theme-tag") as HTMLInputElement).value || null;
		void themeController.run({ method, seed, tag_field: tagField, iterations: 120 });
	});
}

void boot();
