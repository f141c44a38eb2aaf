/** Test support: fixture loading and a recording fake-fetch server. */

import { readFileSync } from "node:fs";
import type { FetchLike } from "../src/api.js";

export function fixture<T = any>(name: string): T {
	const url = new URL(`./fixtures/${name}`, import.meta.url);
	return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export interface RecordedCall {
	method: string;
	path: string;
	body: unknown;
}

type Responder = (call: RecordedCall) => { status?: number; payload: unknown } | undefined;

/**
 * Replays recorded API responses. Routes are tried in order; the first
 * responder returning a payload wins. Every call is recorded so tests can
 * assert on exactly what was posted.
 */
export class FakeServer {
	calls: RecordedCall[] = [];
	private routes: Responder[] = [];

	on(method: string, path: string, payload: unknown, status = 200): this {
		this.routes.push((call) =>
			call.method === method && call.path === path ? { status, payload } : undefined,
		);
		return this;
	}

	/** Queue-style route: consecutive matching calls pop consecutive payloads. */
	onSequence(method: string, path: string, payloads: unknown[], status = 200): this {
		const queue = [...payloads];
		this.routes.push((call) => {
			if (call.method !== method || call.path !== path) return undefined;
			const payload = queue.length > 1 ? queue.shift() : queue[0];
			return { status, payload };
		});
		return this;
	}

	postsTo(path: string): RecordedCall[] {
		return this.calls.filter((c) => c.method === "POST" && c.path === path);
	}

	fetch: FetchLike = async (url, init) => {
		const parsed = new URL(url, "http://fake");
		const call: RecordedCall = {
			method: init?.method ?? "GET",
			path: parsed.pathname,
			body: init?.body ? JSON.parse(init.body as string) : undefined,
		};
		this.calls.push(call);
		for (const route of this.routes) {
			const hit = route(call);
			if (hit) {
				return new Response(JSON.stringify(hit.payload), {
					status: hit.status ?? 200,
					headers: { "Content-Type": "application/json" },
				});
			}
		}
		return new Response(JSON.stringify({ error: { code: "NoRoute", message: call.path } }), {
			status: 404,
			headers: { "Content-Type": "application/json" },
		});
	};
}

export function failingFetch(message = "connection refused"): FetchLike {
	return async () => {
		throw new Error(message);
	};
}
