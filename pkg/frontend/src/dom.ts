/**
 * Minimal DOM renderer. All state lives in the controllers; these
 * functions just translate view models into elements on each change.
 */

import type {
	ConfigState,
	RecommendationState,
	SearchState,
	ThemeState,
} from "./controllers.js";

function el<K extends keyof HTMLElementTagNameMap>(
	tag: K,
	className = "",
	text = "",
): HTMLElementTagNameMap[K] {
	const node = document.createElement(tag);
	if (className) node.className = className;
	if (text) node.textContent = text;
	return node;
}

function banner(target: HTMLElement, text: string | null): void {
	if (!text) return;
	target.appendChild(el("div", "banner", text));
}

export function renderSearch(root: HTMLElement, state: SearchState, onToggle: (id: string) => void): void {
	root.replaceChildren();
	banner(root, state.banner);
	if (state.status === "loading") {
		root.appendChild(el("p", "muted", "searching..."));
		return;
	}
	if (!state.view) return;

	for (const section of state.view.sections) {
		const box = el("details", "band-section");
		box.open = section.hits.length > 0;
		const head = el("summary", "band-head");
		head.style.borderLeftColor = section.color;
		head.textContent = `${section.label} (${section.hits.length}) - ${section.thresholdText}`;
		box.appendChild(head);

		for (const hit of section.hits) {
			const row = el("details", "hit");
			const label = el("summary", "hit-head");
			const badge = el("span", "score-badge", hit.scoreText);
			badge.style.background = hit.color;
			label.appendChild(badge);
			label.appendChild(el("span", "ticket-id", ` ${hit.ticketId} `));
			label.appendChild(el("span", "muted", hit.matchedTerms.join(", ")));
			row.appendChild(label);

			const explain = el("table", "explain");
			for (const entry of hit.explain) {
				const tr = el("tr");
				tr.appendChild(el("td", "", entry.term));
				tr.appendChild(el("td", "num", entry.contribution.toFixed(4)));
				explain.appendChild(tr);
			}
			row.appendChild(explain);
			row.addEventListener("toggle", () => onToggle(hit.ticketId));
			box.appendChild(row);
		}
		root.appendChild(box);
	}
}

export function renderFilters(
	root: HTMLElement,
	state: SearchState,
	onFilter: (name: string, value: string) => void,
): void {
	root.replaceChildren();
	for (const widget of state.widgets) {
		const wrap = el("label", "filter");
		wrap.appendChild(el("span", "", `${widget.name} (level ${widget.level})`));
		const input = el("input");
		input.value = widget.value;
		input.disabled = !widget.enabled;
		input.placeholder = widget.enabled ? "any" : "set the level above first";
		input.addEventListener("change", () => onFilter(widget.name, input.value.trim()));
		wrap.appendChild(input);
		root.appendChild(wrap);
	}
}

export function renderRecommendations(
	root: HTMLElement,
	state: RecommendationState,
	onVerdict: (label: string, verdict: "accepted" | "rejected") => void,
): void {
	root.replaceChildren();
	banner(root, state.banner);
	if (!state.view) return;

	const table = el("table", "ranked");
	for (const row of state.view.rows) {
		const tr = el("tr", row.verdict ? `judged-${row.verdict}` : "");
		tr.appendChild(el("td", "rank", `#${row.rank}`));
		tr.appendChild(el("td", "", row.label));
		tr.appendChild(el("td", "num", row.scoreText));

		const actions = el("td", "actions");
		for (const verdict of ["accepted", "rejected"] as const) {
			const button = el("button", verdict, verdict === "accepted" ? "accept" : "reject");
			button.disabled = row.pending || row.verdict !== null;
			button.addEventListener("click", () => onVerdict(row.label, verdict));
			actions.appendChild(button);
		}
		tr.appendChild(actions);
		table.appendChild(tr);
	}
	root.appendChild(table);
	root.appendChild(el("p", "muted", `model v${state.view.modelVersion}`));
}

export function renderThemes(
	root: HTMLElement,
	state: ThemeState,
	onPair: (p: string, q: string) => void,
): void {
	root.replaceChildren();
	banner(root, state.banner);
	if (!state.view) return;
	const view = state.view;

	const gauge = el("div", "gauge");
	const fill = el("div", view.gauge.reached ? "gauge-fill ok" : "gauge-fill");
	fill.style.width = `${Math.min(100, view.gauge.value * 100)}%`;
	gauge.appendChild(fill);
	root.appendChild(
		el("p", "", `coverage ${view.gauge.percentText} (target ${view.gauge.target * 100}%)`),
	);
	root.appendChild(gauge);

	const table = el("table", "themes");
	let previous: string | null = null;
	for (const row of view.rows) {
		const tr = el("tr");
		tr.appendChild(el("td", "rank", `#${row.fusedRank}`));
		const phrase = el("td", "phrase", row.phrase);
		if (previous !== null) {
			const pairWith = previous;
			const link = el("button", "pair-link", "co-occurrence with previous");
			link.addEventListener("click", () => onPair(pairWith, row.phrase));
			phrase.appendChild(link);
		}
		tr.appendChild(phrase);
		tr.appendChild(el("td", "num", String(row.ticketCount)));
		tr.appendChild(
			el("td", "muted", row.scores.map((s) => `${s.method}=${s.value.toFixed(4)}`).join(" ")),
		);
		table.appendChild(tr);
		previous = row.phrase;
	}
	root.appendChild(table);

	if (view.spread.length) {
		const spread = el("table", "spread");
		for (const row of view.spread) {
			const tr = el("tr");
			tr.appendChild(el("td", "", row.tag));
			tr.appendChild(el("td", "num", row.percentText));
			spread.appendChild(tr);
		}
		root.appendChild(el("h3", "", `spread by ${view.tagField ?? ""}`));
		root.appendChild(spread);
	}

	if (state.evidence) {
		const panel = el("div", "evidence");
		const [p, q] = state.evidence.phrases;
		panel.appendChild(el("h3", "", `tickets with both "${p}" and "${q}"`));
		if (state.evidence.state === "empty") {
			panel.appendChild(el("p", "muted", "no co-occurrence"));
		} else {
			const list = el("ul");
			for (const ticketId of state.evidence.ticketIds) {
				list.appendChild(el("li", "", ticketId));
			}
			panel.appendChild(list);
		}
		root.appendChild(panel);
	}
}

export function renderConfig(root: HTMLElement, state: ConfigState): void {
	root.replaceChildren();
	banner(root, state.banner);
	for (const violation of state.violations) {
		root.appendChild(el("div", "violation", `${violation.code}: ${violation.message}`));
	}
	const table = el("table", "fields");
	const head = el("tr");
	for (const col of ["field", "kind", "role", "filter level", "column"]) {
		head.appendChild(el("th", "", col));
	}
	table.appendChild(head);
	for (const field of state.fields) {
		const tr = el("tr");
		tr.appendChild(el("td", "", field.name));
		tr.appendChild(el("td", "", field.kind));
		tr.appendChild(el("td", "", field.role));
		tr.appendChild(el("td", "num", field.role === "filter" ? String(field.filter_level) : "-"));
		tr.appendChild(el("td", "", field.column_mapping));
		table.appendChild(tr);
	}
	root.appendChild(table);
}
