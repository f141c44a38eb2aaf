/**
 * Pure view-model builders: API responses in, render-ready structures out.
 *
 * Invariants enforced here:
 * - every displayed number comes from a response field (no local scoring);
 * - a hit's band is taken from the API, and its color follows the band;
 * - filter widgets are ordered by filter_level and a level is only
 *   enabled once every shallower level has a value.
 */

import type {
	Band,
	BandThresholds,
	ConfigResponse,
	FieldSchema,
	PairEvidence,
	RecommendResponse,
	SearchResponse,
	ThemeReport,
} from "./types.js";

export const BAND_ORDER: Band[] = [
	"duplicate_likely",
	"strongly_related",
	"related",
	"weak",
];

// Palette is presentation-only; which band a hit is in always comes from
// the API response, and the thresholds shown are the server's config echo.
const BAND_COLORS: Record<Band, string> = {
	duplicate_likely: "#c62828",
	strongly_related: "#ef6c00",
	related: "#f9a825",
	weak: "#9e9e9e",
};

export const BAND_LABELS: Record<Band, string> = {
	duplicate_likely: "Likely duplicates",
	strongly_related: "Strongly related",
	related: "Related",
	weak: "Weak matches",
};

export interface HitView {
	ticketId: string;
	score: number;
	scoreText: string;
	band: Band;
	color: string;
	matchedTerms: string[];
	explain: { term: string; contribution: number }[];
}

export interface BandSectionView {
	band: Band;
	label: string;
	color: string;
	thresholdText: string;
	hits: HitView[];
}

export interface SearchView {
	sections: BandSectionView[];
	corpusVersion: number | null;
	thresholds: BandThresholds;
	totalHits: number;
}

function thresholdText(band: Band, t: BandThresholds): string {
	switch (band) {
		case "duplicate_likely":
			return `score >= ${t.duplicate}`;
		case "strongly_related":
			return `${t.strong} <= score < ${t.duplicate}`;
		case "related":
			return `${t.related} <= score < ${t.strong}`;
		case "weak":
			return `score < ${t.related}`;
	}
}

export function buildSearchView(response: SearchResponse): SearchView {
	const sections: BandSectionView[] = BAND_ORDER.map((band) => ({
		band,
		label: BAND_LABELS[band],
		color: BAND_COLORS[band],
		thresholdText: thresholdText(band, response.thresholds),
		hits: [],
	}));
	const byBand = new Map(sections.map((s) => [s.band, s]));
	for (const hit of response.hits) {
		const section = byBand.get(hit.band);
		if (!section) continue; // unknown band: never invent a section
		section.hits.push({
			ticketId: hit.ticket_id,
			score: hit.score,
			scoreText: hit.score.toFixed(4),
			band: hit.band,
			color: BAND_COLORS[hit.band],
			matchedTerms: hit.matched_terms,
			explain: hit.explain ?? [],
		});
	}
	return {
		sections,
		corpusVersion: response.corpus_version,
		thresholds: response.thresholds,
		totalHits: response.hits.length,
	};
}

// --- filters -------------------------------------------------------------

export interface FilterWidget {
	name: string;
	level: number;
	value: string;
	enabled: boolean;
}

/** Filter widgets in hierarchy order; level k stays disabled until every
 * level below k has a value. */
export function buildFilterWidgets(
	fields: FieldSchema[],
	values: Record<string, string>,
): FilterWidget[] {
	const filters = fields
		.filter((f) => f.role === "filter" && f.filter_level >= 1)
		.sort((a, b) => a.filter_level - b.filter_level || a.name.localeCompare(b.name));
	const widgets: FilterWidget[] = [];
	for (const field of filters) {
		const shallower = filters.filter((f) => f.filter_level < field.filter_level);
		const enabled = shallower.every((f) => (values[f.name] ?? "") !== "");
		widgets.push({
			name: field.name,
			level: field.filter_level,
			value: values[field.name] ?? "",
			enabled,
		});
	}
	return widgets;
}

export function activeFilters(widgets: FilterWidget[]): [string, string][] {
	return widgets.filter((w) => w.value !== "").map((w) => [w.name, w.value]);
}

// --- recommendations -------------------------------------------------------

export type Verdict = "accepted" | "rejected";

export interface RecommendationRow {
	label: string;
	score: number;
	scoreText: string;
	rank: number;
	verdict: Verdict | null;
	pending: boolean;
}

export interface RecommendationView {
	target: string;
	modelVersion: number;
	rows: RecommendationRow[];
}

export function buildRecommendationView(
	response: RecommendResponse,
	verdicts: Record<string, Verdict>,
	pending: Record<string, boolean> = {},
): RecommendationView {
	return {
		target: response.recommendation.target_field,
		modelVersion: response.model_version,
		rows: response.recommendation.ranked.map((entry, i) => ({
			label: entry.label,
			score: entry.score,
			scoreText: entry.score.toFixed(4),
			rank: i + 1,
			verdict: verdicts[entry.label] ?? null,
			pending: pending[entry.label] ?? false,
		})),
	};
}

// --- themes ---------------------------------------------------------------

export interface ThemeRow {
	phrase: string;
	fusedRank: number;
	scores: { method: string; value: number }[];
	ticketCount: number;
}

export interface CoverageGauge {
	value: number;      // exactly the report's achieved coverage
	target: number;
	percentText: string;
	reached: boolean;
}

export interface SpreadRow {
	tag: string;
	fraction: number;
	percentText: string;
}

export interface ThemeView {
	method: string;
	gauge: CoverageGauge;
	rows: ThemeRow[];
	spread: SpreadRow[];
	tagField: string | null;
	corpusVersion: string;
}

export function buildThemeView(report: ThemeReport): ThemeView {
	return {
		method: report.method,
		gauge: {
			value: report.coverage,
			target: report.coverage_target,
			percentText: `${(report.coverage * 100).toFixed(1)}%`,
			reached: report.coverage >= report.coverage_target,
		},
		rows: report.terms.map((term) => ({
			phrase: term.phrase,
			fusedRank: term.fused_rank,
			scores: Object.entries(term.method_scores)
				.sort(([a], [b]) => a.localeCompare(b))
				.map(([method, value]) => ({ method, value })),
			ticketCount: term.supporting_tickets.length,
		})),
		spread: Object.entries(report.spread)
			.sort(([a], [b]) => a.localeCompare(b))
			.map(([tag, fraction]) => ({
				tag,
				fraction,
				percentText: `${(fraction * 100).toFixed(1)}%`,
			})),
		tagField: report.tag_field,
		corpusVersion: report.corpus_version,
	};
}

export interface EvidenceView {
	phrases: [string, string];
	state: "list" | "empty";
	ticketIds: string[];
	count: number;
}

export function buildEvidenceView(evidence: PairEvidence): EvidenceView {
	return {
		phrases: evidence.phrases,
		state: evidence.count === 0 ? "empty" : "list",
		ticketIds: evidence.ticket_ids,
		count: evidence.count,
	};
}

// --- config ---------------------------------------------------------------

export interface ConfigView {
	rows: {
		name: string;
		kind: string;
		role: string;
		level: number | null;
		column: string;
	}[];
	filterOrder: string[];
}

export function buildConfigView(response: ConfigResponse): ConfigView {
	const rows = response.fields.map((f) => ({
		name: f.name,
		kind: f.kind,
		role: f.role,
		level: f.role === "filter" ? f.filter_level : null,
		column: f.column_mapping,
	}));
	const filterOrder = buildFilterWidgets(response.fields, {}).map((w) => w.name);
	return { rows, filterOrder };
}
