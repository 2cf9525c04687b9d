// Thin fetch client over the engine's /api endpoints.

import { ApiError, EntityCard, ScoredPath, Stats, TrendingPattern } from "./types.js";

export class ApiRequestError extends Error {
    constructor(public status: number, public body: ApiError) {
        super(body.detail || body.error);
    }
}

async function getJson<T>(url: string): Promise<T> {
    const resp = await fetch(url, { headers: { Accept: "application/json" } });
    if (!resp.ok) {
        let body: ApiError;
        try {
            body = (await resp.json()) as ApiError;
        } catch {
            body = { error: `HTTP ${resp.status}`, detail: resp.statusText };
        }
        throw new ApiRequestError(resp.status, body);
    }
    return (await resp.json()) as T;
}

export function fetchEntity(name: string): Promise<EntityCard> {
    return getJson(`/api/entity?name=${encodeURIComponent(name)}`);
}

export interface PathQuery {
    from: string;
    to: string;
    rel?: string;
    k?: number;
    maxHops?: number;
}

export function fetchPaths(query: PathQuery): Promise<ScoredPath[]> {
    const params = new URLSearchParams({ from: query.from, to: query.to });
    if (query.rel) params.set("rel", query.rel);
    if (query.k !== undefined) params.set("k", String(query.k));
    if (query.maxHops !== undefined) params.set("maxHops", String(query.maxHops));
    return getJson(`/api/paths?${params.toString()}`);
}

export function fetchTrending(): Promise<TrendingPattern[]> {
    return getJson("/api/trending");
}

export function fetchStats(): Promise<Stats> {
    return getJson("/api/stats");
}
