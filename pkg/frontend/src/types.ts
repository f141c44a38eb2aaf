/**
 * Payload types mirroring the triagekit HTTP API.
 *
 * The console never derives numbers on its own: every score, band,
 * coverage value or threshold shown on screen is one of these fields.
 */

export type Band = "duplicate_likely" | "strongly_related" | "related" | "weak";

export interface BandThresholds {
	duplicate: number;
	strong: number;
	related: number;
}

export interface ExplainEntry {
	term: string;
	contribution: number;
}

export interface SearchHit {
	ticket_id: string;
	score: number;
	band: Band;
	matched_terms: string[];
	explain?: ExplainEntry[];
}

export interface SearchResponse {
	hits: SearchHit[];
	corpus_version: number | null;
	index_version?: number | null;
	thresholds: BandThresholds;
}

export interface SearchRequest {
	text: string;
	filters: [string, string][];
	date_from?: string | null;
	date_to?: string | null;
	k: number;
	explain?: boolean;
}

export interface FieldSchema {
	name: string;
	kind: "predefined" | "custom";
	role: "information" | "filter";
	filter_level: number;
	column_mapping: string;
	datetime_format: string | null;
}

export interface ConfigResponse {
	fields: FieldSchema[];
	corpus_version: number | null;
	thresholds: BandThresholds;
}

export interface RankedLabel {
	label: string;
	score: number;
}

export interface Recommendation {
	target_field: string;
	ranked: RankedLabel[];
	model_version: string;
	recency_from: string | null;
	recency_to: string | null;
}

export interface RecommendResponse {
	recommendation: Recommendation;
	model_version: number;
	corpus_version: number | null;
	thresholds: BandThresholds;
}

export interface RecommendRequest {
	ticket: { id?: string; summary: string; description?: string };
	recency_from?: string | null;
	recency_to?: string | null;
	train?: { seed: number };
}

export interface FeedbackEventBody {
	event_id: string;
	ticket_id: string;
	target_field: string;
	label: string;
	verdict: "accepted" | "rejected";
}

export interface FeedbackAck {
	model_version: number;
	event_id: string;
}

export interface ThemeTerm {
	phrase: string;
	method_scores: Record<string, number>;
	fused_rank: number;
	supporting_tickets: string[];
}

export interface ThemeReport {
	method: string;
	terms: ThemeTerm[];
	coverage: number;
	coverage_target: number;
	spread: Record<string, number>;
	tag_field: string | null;
	corpus_version: string;
	generated_at: string;
}

export interface ThemesResponse {
	report: ThemeReport;
	corpus_version: number | null;
	thresholds: BandThresholds;
}

export interface ThemesRequest {
	method: string;
	seed: number;
	tag_field?: string | null;
	iterations?: number;
	lsa_rank?: number;
}

export interface PairEvidence {
	phrases: [string, string];
	count: number;
	ticket_ids: string[];
}

export interface PairEvidenceResponse {
	evidence: PairEvidence;
	corpus_version: number | null;
	thresholds: BandThresholds;
}

export interface ApiErrorBody {
	code: string;
	message: string;
	violations?: { code: string; field: string; message: string }[];
}
