// Session-local query history: newest first, consecutive duplicates
// collapsed, capped.  Lives only in page memory, so a refresh clears it.

import { ParsedQuery } from "./templates.js";

export function describeQuery(query: ParsedQuery): string {
    if (query.kind === "entity") {
        return query.name;
    }
    const rel = query.rel ? ` via ${query.rel}` : "";
    return `${query.from} ~ ${query.to}${rel}`;
}

export class QueryHistory {
    private items: ParsedQuery[] = [];

    constructor(private limit: number = 10) {}

    record(query: ParsedQuery): void {
        const key = JSON.stringify(query);
        this.items = this.items.filter((q) => JSON.stringify(q) !== key);
        this.items.unshift(query);
        if (this.items.length > this.limit) {
            this.items.length = this.limit;
        }
    }

    entries(): readonly ParsedQuery[] {
        return this.items;
    }
}

export function renderHistory(history: QueryHistory): string {
    const entries = history.entries();
    if (entries.length === 0) {
        return "";
    }
    const chips = entries.map((q, i) =>
        `<button class="history-chip" data-history="${i}">` +
        `${describeQuery(q).replace(/&/g, "&amp;").replace(/</g, "&lt;")}</button>`)
        .join(" ");
    return `<div class="history">${chips}</div>`;
}
