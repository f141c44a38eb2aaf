/**
 * Screen controllers: per-section state machines between the API client
 * and the renderer. One in-flight request per section; stale responses
 * (superseded by a newer request) are discarded by sequence number.
 */

import { ApiClient, ApiError } from "./api.js";
import type {
	FeedbackEventBody,
	FieldSchema,
	RecommendRequest,
	SearchRequest,
	ThemesRequest,
} from "./types.js";
import {
	activeFilters,
	buildEvidenceView,
	buildFilterWidgets,
	buildRecommendationView,
	buildSearchView,
	buildThemeView,
	type EvidenceView,
	type FilterWidget,
	type RecommendationView,
	type SearchView,
	type ThemeView,
	type Verdict,
} from "./viewmodels.js";

export type Listener<S> = (state: S) => void;

function message(error: unknown): string {
	if (error instanceof ApiError) return `${error.code}: ${error.message}`;
	return error instanceof Error ? error.message : String(error);
}

// --- search -----------------------------------------------------------------

export interface SearchInputs {
	text: string;
	dateFrom: string;
	dateTo: string;
	k: number;
}

export interface SearchState {
	status: "idle" | "loading" | "done" | "error";
	inputs: SearchInputs;
	filterValues: Record<string, string>;
	widgets: FilterWidget[];
	view: SearchView | null;
	banner: string | null; // non-blocking: inputs and last view stay put
}

export class SearchController {
	private seq = 0;
	state: SearchState;

	constructor(
		private readonly api: ApiClient,
		private fields: FieldSchema[],
		private readonly notify: Listener<SearchState> = () => {},
	) {
		this.state = {
			status: "idle",
			inputs: { text: "", dateFrom: "", dateTo: "", k: 10 },
			filterValues: {},
			widgets: buildFilterWidgets(fields, {}),
			view: null,
			banner: null,
		};
	}

	setFields(fields: FieldSchema[]): void {
		this.fields = fields;
		this.state.widgets = buildFilterWidgets(fields, this.state.filterValues);
		this.notify(this.state);
	}

	/** Hierarchy rule: a value is accepted only while its widget is enabled;
	 * changing a level clears every deeper level. */
	setFilter(name: string, value: string): boolean {
		const widget = this.state.widgets.find((w) => w.name === name);
		if (!widget || !widget.enabled) return false;
		const values = { ...this.state.filterValues, [name]: value };
		for (const other of this.state.widgets) {
			if (other.level > widget.level) delete values[other.name];
		}
		if (value === "") delete values[name];
		this.state.filterValues = values;
		this.state.widgets = buildFilterWidgets(this.fields, values);
		this.notify(this.state);
		return true;
	}

	async runSearch(inputs: SearchInputs): Promise<void> {
		const mySeq = ++this.seq;
		this.state = { ...this.state, status: "loading", inputs, banner: null };
		this.notify(this.state);

		const request: SearchRequest = {
			text: inputs.text,
			filters: activeFilters(this.state.widgets),
			date_from: inputs.dateFrom || null,
			date_to: inputs.dateTo || null,
			k: inputs.k,
			explain: true,
		};
		try {
			const response = await this.api.search(request);
			if (mySeq !== this.seq) return; // superseded
			this.state = { ...this.state, status: "done", view: buildSearchView(response) };
		} catch (error) {
			if (mySeq !== this.seq) return;
			this.state = { ...this.state, status: "error", banner: message(error) };
		}
		this.notify(this.state);
	}
}

// --- recommendations ----------------------------------------------------------

export interface RecommendationState {
	status: "idle" | "loading" | "done" | "error";
	view: RecommendationView | null;
	banner: string | null;
	eventsPosted: number;
}

export type IdGenerator = () => string;

const defaultIdGenerator: IdGenerator = () =>
	`ui-${Date.now().toString(36)}-${Math.random().toString(36).slice(2, 10)}`;

export class RecommendationController {
	private seq = 0;
	private verdicts: Record<string, Verdict> = {};
	private pending: Record<string, boolean> = {};
	private lastRequest: { target: "assignee" | "business-process"; body: RecommendRequest } | null =
		null;
	state: RecommendationState = { status: "idle", view: null, banner: null, eventsPosted: 0 };

	constructor(
		private readonly api: ApiClient,
		private readonly ticketId: string,
		private readonly notify: Listener<RecommendationState> = () => {},
		private readonly nextEventId: IdGenerator = defaultIdGenerator,
	) {}

	async load(target: "assignee" | "business-process", body: RecommendRequest): Promise<void> {
		const mySeq = ++this.seq;
		this.lastRequest = { target, body };
		this.state = { ...this.state, status: "loading", banner: null };
		this.notify(this.state);
		try {
			const response = await this.api.recommend(target, body);
			if (mySeq !== this.seq) return;
			this.state = {
				...this.state,
				status: "done",
				view: buildRecommendationView(response, this.verdicts, this.pending),
			};
		} catch (error) {
			if (mySeq !== this.seq) return;
			this.state = { ...this.state, status: "error", banner: message(error) };
		}
		this.notify(this.state);
	}

	/** Posts exactly one event per (label, first verdict): repeat clicks and
	 * conflicting verdicts on an already-judged row are ignored locally, and
	 * a server-side DuplicateEventId maps to an "already recorded" banner. */
	async submitVerdict(label: string, verdict: Verdict): Promise<"posted" | "ignored"> {
		const view = this.state.view;
		if (!view) return "ignored";
		const row = view.rows.find((r) => r.label === label);
		if (!row || row.verdict !== null || this.pending[label]) return "ignored";

		this.pending[label] = true;
		this.refreshRows();

		const event: FeedbackEventBody = {
			event_id: this.nextEventId(),
			ticket_id: this.ticketId,
			target_field: view.target,
			label,
			verdict,
		};
		let notice: string | null = null;
		try {
			await this.api.feedback(event);
			this.state.eventsPosted += 1;
			this.verdicts[label] = verdict;
		} catch (error) {
			if (error instanceof ApiError && error.code === "DuplicateEventId") {
				notice = "already recorded";
				this.verdicts[label] = verdict;
			} else {
				this.state = { ...this.state, banner: message(error) };
				delete this.pending[label];
				this.refreshRows();
				this.notify(this.state);
				return "ignored";
			}
		}
		delete this.pending[label];

		// verdict acknowledged: re-query so the visible scores come from a
		// fresh response rather than any local arithmetic
		if (this.lastRequest) {
			const { target, body } = this.lastRequest;
			const requery: RecommendRequest = { ...body, train: undefined };
			await this.load(target, requery);
		} else {
			this.refreshRows();
		}
		if (notice !== null) {
			this.state = { ...this.state, banner: notice };
		}
		this.notify(this.state);
		return "posted";
	}

	private refreshRows(): void {
		const view = this.state.view;
		if (!view) return;
		view.rows = view.rows.map((row) => ({
			...row,
			verdict: this.verdicts[row.label] ?? null,
			pending: this.pending[row.label] ?? false,
		}));
	}

	scoreOf(label: string): number | null {
		const row = this.state.view?.rows.find((r) => r.label === label);
		return row ? row.score : null;
	}
}

// --- themes -------------------------------------------------------------------

export interface ThemeState {
	status: "idle" | "loading" | "done" | "error";
	view: ThemeView | null;
	evidence: EvidenceView | null;
	evidenceStatus: "idle" | "loading" | "done" | "error";
	banner: string | null;
}

export class ThemeController {
	private seq = 0;
	private evidenceSeq = 0;
	state: ThemeState = {
		status: "idle",
		view: null,
		evidence: null,
		evidenceStatus: "idle",
		banner: null,
	};

	constructor(
		private readonly api: ApiClient,
		private readonly notify: Listener<ThemeState> = () => {},
	) {}

	async run(request: ThemesRequest): Promise<void> {
		const mySeq = ++this.seq;
		this.state = { ...this.state, status: "loading", banner: null };
		this.notify(this.state);
		try {
			const response = await this.api.themes(request);
			if (mySeq !== this.seq) return;
			this.state = {
				...this.state,
				status: "done",
				view: buildThemeView(response.report),
			};
		} catch (error) {
			if (mySeq !== this.seq) return;
			this.state = { ...this.state, status: "error", banner: message(error) };
		}
		this.notify(this.state);
	}

	async selectPair(p: string, q: string): Promise<void> {
		const mySeq = ++this.evidenceSeq;
		this.state = { ...this.state, evidenceStatus: "loading" };
		this.notify(this.state);
		try {
			const response = await this.api.themePair(p, q);
			if (mySeq !== this.evidenceSeq) return;
			this.state = {
				...this.state,
				evidenceStatus: "done",
				evidence: buildEvidenceView(response.evidence),
			};
		} catch (error) {
			if (mySeq !== this.evidenceSeq) return;
			this.state = { ...this.state, evidenceStatus: "error", banner: message(error) };
		}
		this.notify(this.state);
	}
}

// --- config ---------------------------------------------------------------------

export interface ConfigState {
	status: "idle" | "loading" | "done" | "error";
	fields: FieldSchema[];
	violations: { code: string; field: string; message: string }[];
	banner: string | null;
}

export class ConfigController {
	state: ConfigState = { status: "idle", fields: [], violations: [], banner: null };

	constructor(
		private readonly api: ApiClient,
		private readonly notify: Listener<ConfigState> = () => {},
	) {}

	async load(): Promise<void> {
		this.state = { ...this.state, status: "loading", banner: null };
		this.notify(this.state);
		try {
			const response = await this.api.getFields();
			this.state = { ...this.state, status: "done", fields: response.fields, violations: [] };
		} catch (error) {
			this.state = { ...this.state, status: "error", banner: message(error) };
		}
		this.notify(this.state);
	}

	async save(fields: FieldSchema[]): Promise<boolean> {
		try {
			const response = await this.api.putFields(fields);
			this.state = { ...this.state, status: "done", fields: response.fields, violations: [] };
			this.notify(this.state);
			return true;
		} catch (error) {
			if (error instanceof ApiError && error.violations.length > 0) {
				this.state = { ...this.state, violations: error.violations, banner: null };
			} else {
				this.state = { ...this.state, banner: message(error) };
			}
			this.notify(this.state);
			return false;
		}
	}
}
