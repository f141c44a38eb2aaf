/**
 * Thin typed client over fetch. The fetch function is injectable so
 * contract tests can replay recorded responses without a server.
 */

import type {
	ConfigResponse,
	FeedbackAck,
	FeedbackEventBody,
	FieldSchema,
	PairEvidenceResponse,
	RecommendRequest,
	RecommendResponse,
	SearchRequest,
	SearchResponse,
	ThemesRequest,
	ThemesResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
	constructor(
		public readonly status: number,
		public readonly code: string,
		message: string,
		public readonly violations: { code: string; field: string; message: string }[] = [],
	) {
		super(message);
	}
}

export class ApiClient {
	constructor(
		private readonly baseUrl: string,
		private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
	) {}

	private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
		const response = await this.fetchFn(`${this.baseUrl}${path}`, {
			method,
			headers: body === undefined ? {} : { "Content-Type": "application/json" },
			body: body === undefined ? undefined : JSON.stringify(body),
		});
		const payload = await response.json();
		if (!response.ok) {
			const error = payload?.error ?? { code: "Unknown", message: response.statusText };
			throw new ApiError(response.status, error.code, error.message, error.violations ?? []);
		}
		return payload as T;
	}

	getFields(): Promise<ConfigResponse> {
		return this.request("GET", "/config/fields");
	}

	putFields(fields: FieldSchema[]): Promise<ConfigResponse> {
		return this.request("PUT", "/config/fields", fields);
	}

	search(body: SearchRequest): Promise<SearchResponse> {
		return this.request("POST", "/search", body);
	}

	recommend(target: "assignee" | "business-process", body: RecommendRequest): Promise<RecommendResponse> {
		return this.request("POST", `/recommend/${target}`, body);
	}

	feedback(event: FeedbackEventBody): Promise<FeedbackAck> {
		return this.request("POST", "/feedback", event);
	}

	themes(body: ThemesRequest): Promise<ThemesResponse> {
		return this.request("POST", "/themes", body);
	}

	themePair(p: string, q: string): Promise<PairEvidenceResponse> {
		const params = new URLSearchParams({ p, q });
		return this.request("GET", `/themes/pair?${params.toString()}`);
	}
}
