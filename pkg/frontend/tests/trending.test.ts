import { describe, expect, it } from "vitest";

import { FeedView, TrendingPoller, diffEmissions } from "../src/trending.js";
import { TrendingPattern } from "../src/types.js";

function pattern(code: string, support = 3): TrendingPattern {
    return {
        code,
        edges: [{ srcLabel: "company", pred: "uses", dstLabel: "product",
                  srcVar: 0, dstVar: 1 }],
        support,
        closed: true,
        window: { firstBatch: 0, lastBatch: 5 },
    };
}

describe("emission diff", () => {
    it("first emission highlights nothing", () => {
        expect(diffEmissions(null, [pattern("a")])).toEqual(new Set());
    });

    it("identical consecutive emissions cause no churn", () => {
        const emission = [pattern("a"), pattern("b")];
        expect(diffEmissions(emission, emission)).toEqual(new Set());
    });

    it("one added pattern highlights exactly that card", () => {
        const first = [pattern("a")];
        const second = [pattern("a"), pattern("b")];
        expect(diffEmissions(first, second)).toEqual(new Set(["b"]));
    });

    it("support changes alone are not highlighted", () => {
        expect(diffEmissions([pattern("a", 3)], [pattern("a", 5)]))
            .toEqual(new Set());
    });
});

describe("poller against a scripted server", () => {
    it("highlights exactly the delta after the second poll", async () => {
        const emissions = [
            [pattern("a")],
            [pattern("a"), pattern("b")],
        ];
        let call = 0;
        const views: FeedView[] = [];
        const poller = new TrendingPoller(
            async () => emissions[Math.min(call++, emissions.length - 1)],
            (view) => views.push(view),
            60_000,
            () => new Date("2015-03-02T00:00:00Z"),
        );
        await poller.poll();
        await poller.poll();
        expect(views).toHaveLength(2);
        expect(views[0].highlights).toEqual(new Set());
        expect(views[1].highlights).toEqual(new Set(["b"]));
        expect(views[1].patterns.map((p) => p.code)).toEqual(["a", "b"]);
        expect(views[1].stale).toBe(false);
    });

    it("connection loss flags stale data with the last update time", async () => {
        let fail = false;
        const clock = () => new Date("2015-03-02T00:00:00Z");
        const views: FeedView[] = [];
        const poller = new TrendingPoller(
            async () => {
                if (fail) {
                    throw new Error("connection refused");
                }
                return [pattern("a")];
            },
            (view) => views.push(view),
            60_000,
            clock,
        );
        await poller.poll();
        fail = true;
        await poller.poll();
        expect(views[1].stale).toBe(true);
        expect(views[1].patterns.map((p) => p.code)).toEqual(["a"]);
        expect(views[1].lastUpdated).toEqual(new Date("2015-03-02T00:00:00Z"));
    });
});
