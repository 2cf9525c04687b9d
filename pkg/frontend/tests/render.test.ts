import { describe, expect, it } from "vitest";

import { renderEntityCard, renderEntityError, renderPaths,
         renderTrending } from "../src/render.js";
import { EntityCard, ScoredPath, TrendingPattern } from "../src/types.js";

const CARD: EntityCard = {
    entity: { id: 0, label: "dji", types: ["company"], origin: "curated",
              aliases: [] },
    factCount: 3,
    groups: [
        {
            predicate: "manufactures",
            facts: [
                { subject: "dji", predicate: "manufactures", object: "drone",
                  direction: "out", confidence: 1.0, provenance: "curated",
                  timestamp: 0 },
                { subject: "dji", predicate: "manufactures", object: "quadcopter",
                  direction: "out", confidence: 0.62,
                  provenance: "extracted:wsj-010", timestamp: 1425254400 },
            ],
        },
        {
            predicate: "uses",
            facts: [
                { subject: "windermere", predicate: "uses", object: "dji",
                  direction: "in", confidence: 0.5,
                  provenance: "extracted:wsj-001", timestamp: 1425254400 },
            ],
        },
    ],
};

const PATHS: ScoredPath[] = [
    {
        vertices: ["windermere", "drone", "dji"],
        edges: [
            { s: "windermere", p: "uses", o: "drone", direction: "forward",
              confidence: 0.5, provenance: "extracted:wsj-001" },
            { s: "dji", p: "manufactures", o: "drone", direction: "reverse",
              confidence: 1.0, provenance: "curated" },
        ],
        coherence: 0.1405,
        meanConfidence: 0.75,
    },
];

const PATTERNS: TrendingPattern[] = [
    {
        code: "0|company|uses|product|1",
        edges: [{ srcLabel: "company", pred: "uses", dstLabel: "product",
                  srcVar: 0, dstVar: 1 }],
        support: 3,
        closed: true,
        window: { firstBatch: 0, lastBatch: 5 },
    },
    {
        code: "0|company|releases|Entity|1",
        edges: [{ srcLabel: "company", pred: "releases", dstLabel: "Entity",
                  srcVar: 0, dstVar: 1 }],
        support: 3,
        closed: true,
        window: { firstBatch: 0, lastBatch: 5 },
    },
];

describe("entity card", () => {
    it("renders deterministically", () => {
        expect(renderEntityCard(CARD)).toBe(renderEntityCard(CARD));
        expect(renderEntityCard(CARD)).toMatchSnapshot();
    });

    it("shows confidence and provenance for every fact", () => {
        const html = renderEntityCard(CARD);
        expect(html.match(/class="conf"/g)?.length).toBe(3);
        expect(html).toContain('badge curated');
        expect(html).toContain('badge extracted');
        expect(html).toContain("web: wsj-010");
    });

    it("makes neighbor labels clickable", () => {
        const html = renderEntityCard(CARD);
        expect(html).toContain('data-entity="drone"');
        expect(html).toContain('data-entity="windermere"');
    });

    it("escapes markup in labels", () => {
        const hostile: EntityCard = {
            ...CARD,
            entity: { ...CARD.entity, label: "<script>x</script>" },
            groups: [],
        };
        const html = renderEntityCard(hostile);
        expect(html).not.toContain("<script>");
        expect(html).toContain("&lt;script&gt;");
    });

    it("renders 404 with clickable suggestions", () => {
        const html = renderEntityError({
            error: "UnknownEntity", detail: "no entity named 'djii'",
            suggestions: ["dji"] });
        expect(html).toContain("Unknown entity");
        expect(html).toContain('data-entity="dji"');
    });
});

describe("path list", () => {
    it("renders deterministically", () => {
        expect(renderPaths(PATHS, 4)).toBe(renderPaths(PATHS, 4));
        expect(renderPaths(PATHS, 4)).toMatchSnapshot();
    });

    it("shows direction arrows, per-edge confidence and provenance", () => {
        const html = renderPaths(PATHS, 4);
        expect(html).toContain("&rarr;");
        expect(html).toContain("&larr;");
        expect(html.match(/class="conf"/g)?.length).toBe(2);
        expect(html.match(/class="badge/g)?.length).toBe(2);
        expect(html).toContain("coherence 0.1405");
    });

    it("keeps the server ordering", () => {
        const two = [PATHS[0], { ...PATHS[0], coherence: 0.9 }];
        const html = renderPaths(two, 4);
        expect(html.indexOf("coherence 0.1405"))
            .toBeLessThan(html.indexOf("coherence 0.9000"));
    });

    it("renders the empty state with the hop budget", () => {
        expect(renderPaths([], 4)).toContain("No explanation found within 4 hops");
    });
});

describe("trending cards", () => {
    it("renders deterministically", () => {
        const html = renderTrending(PATTERNS, new Set());
        expect(html).toBe(renderTrending(PATTERNS, new Set()));
        expect(html).toMatchSnapshot();
    });

    it("shows support counts and labeled edges", () => {
        const html = renderTrending(PATTERNS, new Set());
        expect(html).toContain("support 3");
        expect(html).toContain("company");
        expect(html).toContain("uses");
    });

    it("highlights exactly the given codes", () => {
        const html = renderTrending(PATTERNS,
                                    new Set(["0|company|uses|product|1"]));
        expect(html.match(/pattern-card fresh/g)?.length).toBe(1);
        const fresh = html.indexOf("pattern-card fresh");
        expect(html.slice(fresh, fresh + 200)).toContain("uses");
    });

    it("renders the empty window state", () => {
        expect(renderTrending([], new Set())).toContain("No patterns");
    });
});
