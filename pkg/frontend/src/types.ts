// Payload shapes of the engine's HTTP API.

export interface EntityInfo {
    id: number;
    label: string;
    types: string[];
    origin: "curated" | "extracted";
    aliases: string[];
}

export interface FactRow {
    subject: string;
    predicate: string;
    object: string;
    direction: "out" | "in";
    confidence: number;
    provenance: string; // "curated" or "extracted:<source>"
    timestamp: number;
}

export interface PredicateGroup {
    predicate: string;
    facts: FactRow[];
}

export interface EntityCard {
    entity: EntityInfo;
    factCount: number;
    groups: PredicateGroup[];
}

export interface PathEdge {
    s: string;
    p: string;
    o: string;
    direction: "forward" | "reverse";
    confidence: number;
    provenance: string;
}

export interface ScoredPath {
    vertices: string[];
    edges: PathEdge[];
    coherence: number;
    meanConfidence: number;
}

export interface PatternEdge {
    srcLabel: string;
    pred: string;
    dstLabel: string;
    srcVar: number;
    dstVar: number;
}

export interface TrendingPattern {
    code: string;
    edges: PatternEdge[];
    support: number;
    closed: boolean;
    window: { firstBatch: number; lastBatch: number };
}

export interface Stats {
    entities: number;
    facts: number;
    patterns: number;
    lastBatch: number | null;
    modelVersions: Record<string, number>;
}

export interface ApiError {
    error: string;
    detail: string;
    suggestions?: string[];
}
