/**
 * Recommendation screen contract tests: ranked rows from recorded
 * responses, exactly one feedback event per verdict (double-click safe),
 * re-rendered scores move in the verdict's direction, 409 handling.
 */

import { describe, expect, test } from "vitest";
import { ApiClient } from "../src/api.js";
import { RecommendationController } from "../src/controllers.js";
import type { FeedbackAck, RecommendResponse } from "../src/types.js";
import { FakeServer, fixture } from "./helpers.js";

const before = fixture<RecommendResponse>("recommend_before.json");
const afterAccept = fixture<RecommendResponse>("recommend_after_accept.json");
const afterReject = fixture<RecommendResponse>("recommend_after_reject.json");
const ack = fixture<FeedbackAck>("feedback_ack.json");
const duplicate409 = fixture("feedback_duplicate_409.json");

function controllerWith(server: FakeServer): RecommendationController {
	let n = 0;
	return new RecommendationController(
		new ApiClient("http://fake", server.fetch),
		"T008",
		() => {},
		() => `test-ev-${++n}`,
	);
}

function score(response: RecommendResponse, label: string): number {
	return response.recommendation.ranked.find((r) => r.label === label)!.score;
}

describe("recommendation rows", () => {
	test("ranked labels and scores come straight from the response", async () => {
		const server = new FakeServer().on("POST", "/recommend/assignee", before);
		const controller = controllerWith(server);
		await controller.load("assignee", { ticket: { summary: "login password lockout" } });

		const rows = controller.state.view!.rows;
		expect(rows.map((r) => r.label)).toEqual(
			before.recommendation.ranked.map((r) => r.label),
		);
		for (const row of rows) {
			expect(row.score).toBe(score(before, row.label));
			expect(row.verdict).toBeNull();
		}
	});
});

describe("accept flow", () => {
	test("posts exactly one event, re-renders a higher score", async () => {
		const server = new FakeServer()
			.onSequence("POST", "/recommend/assignee", [before, afterAccept])
			.on("POST", "/feedback", ack, 202);
		const controller = controllerWith(server);
		await controller.load("assignee", { ticket: { summary: "login password lockout" } });
		const shownBefore = controller.scoreOf("ana")!;

		const outcome = await controller.submitVerdict("ana", "accepted");
		expect(outcome).toBe("posted");
		expect(server.postsTo("/feedback")).toHaveLength(1);
		expect(controller.state.eventsPosted).toBe(1);

		const shownAfter = controller.scoreOf("ana")!;
		expect(shownAfter).toBe(score(afterAccept, "ana"));
		expect(shownAfter).toBeGreaterThan(shownBefore); // accept raises

		const row = controller.state.view!.rows.find((r) => r.label === "ana")!;
		expect(row.verdict).toBe("accepted");
	});

	test("double-click records a single event", async () => {
		const server = new FakeServer()
			.onSequence("POST", "/recommend/assignee", [before, afterAccept])
			.on("POST", "/feedback", ack, 202);
		const controller = controllerWith(server);
		await controller.load("assignee", { ticket: { summary: "login password lockout" } });

		const [first, second] = await Promise.all([
			controller.submitVerdict("ana", "accepted"),
			controller.submitVerdict("ana", "accepted"),
		]);
		expect([first, second].sort()).toEqual(["ignored", "posted"]);
		expect(server.postsTo("/feedback")).toHaveLength(1);

		// a judged row can never flip to the opposite verdict
		expect(await controller.submitVerdict("ana", "rejected")).toBe("ignored");
		expect(server.postsTo("/feedback")).toHaveLength(1);
		const row = controller.state.view!.rows.find((r) => r.label === "ana")!;
		expect(row.verdict).toBe("accepted");
	});
});

describe("reject flow", () => {
	test("re-rendered score moves down after a reject", async () => {
		const server = new FakeServer()
			.onSequence("POST", "/recommend/assignee", [afterAccept, afterReject])
			.on("POST", "/feedback", ack, 202);
		const controller = controllerWith(server);
		await controller.load("assignee", { ticket: { summary: "login password lockout" } });
		const shownBefore = controller.scoreOf("bo")!;

		await controller.submitVerdict("bo", "rejected");
		const shownAfter = controller.scoreOf("bo")!;
		expect(shownAfter).toBe(score(afterReject, "bo"));
		expect(shownAfter).toBeLessThan(shownBefore); // reject lowers
	});
});

describe("duplicate event handling", () => {
	test("409 maps to an 'already recorded' banner", async () => {
		const server = new FakeServer()
			.onSequence("POST", "/recommend/assignee", [before, afterAccept])
			.on("POST", "/feedback", duplicate409, 409);
		const controller = controllerWith(server);
		await controller.load("assignee", { ticket: { summary: "login password lockout" } });

		const outcome = await controller.submitVerdict("ana", "accepted");
		expect(outcome).toBe("posted");
		expect(controller.state.banner).toBe("already recorded");
		const row = controller.state.view!.rows.find((r) => r.label === "ana")!;
		expect(row.pending).toBe(false);
	});
});
