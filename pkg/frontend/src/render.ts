// Pure HTML-string renderers: deterministic for a fixed API response, so
// they are snapshot-testable without a browser.  Every fact and path edge
// shows its confidence and a curated/extracted provenance badge.

import { ApiError, EntityCard, FactRow, PathEdge, ScoredPath, TrendingPattern } from "./types.js";

export function esc(raw: string): string {
    return raw
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

export function provenanceBadge(provenance: string): string {
    const curated = provenance === "curated";
    const cls = curated ? "badge curated" : "badge extracted";
    const label = curated ? "curated" : esc(provenance.replace("extracted:", "web: "));
    return `<span class="${cls}" title="${esc(provenance)}">${label}</span>`;
}

export function confidenceBar(value: number): string {
    const pct = Math.round(value * 100);
    return `<span class="conf"><span class="conf-fill" style="width:${pct}%"></span>` +
        `<span class="conf-num">${value.toFixed(2)}</span></span>`;
}

function entityLink(label: string): string {
    return `<a href="#" class="entity-link" data-entity="${esc(label)}">${esc(label)}</a>`;
}

function factLine(fact: FactRow): string {
    const triple = fact.direction === "out"
        ? `${entityLink(fact.subject)} <span class="pred">${esc(fact.predicate)}</span> ${entityLink(fact.object)}`
        : `${entityLink(fact.subject)} <span class="pred">${esc(fact.predicate)}</span> ${entityLink(fact.object)} <span class="dir">(incoming)</span>`;
    return `<li class="fact">${triple} ${confidenceBar(fact.confidence)} ${provenanceBadge(fact.provenance)}</li>`;
}

export function renderEntityCard(card: EntityCard): string {
    const types = card.entity.types.length
        ? card.entity.types.map((t) => `<span class="type">${esc(t)}</span>`).join(" ")
        : '<span class="type none">untyped</span>';
    const groups = card.groups.map((group) => {
        const facts = group.facts.map(factLine).join("\n");
        return `<section class="group"><h3>${esc(group.predicate)}</h3><ul>\n${facts}\n</ul></section>`;
    }).join("\n");
    return [
        `<article class="entity-card" data-entity-id="${card.entity.id}">`,
        `<header><h2>${esc(card.entity.label)}</h2>${types}`,
        `${provenanceBadge(card.entity.origin)}<span class="count">${card.factCount} facts</span></header>`,
        groups,
        `</article>`,
    ].join("\n");
}

export function renderEntityError(err: ApiError): string {
    const suggestions = (err.suggestions ?? [])
        .map((s) => `<li>${entityLink(s)}</li>`)
        .join("");
    const hint = suggestions
        ? `<p>Did you mean:</p><ul class="suggestions">${suggestions}</ul>`
        : "";
    return `<div class="not-found"><p>Unknown entity: ${esc(err.detail)}</p>${hint}</div>`;
}

function pathChain(path: ScoredPath): string {
    const parts: string[] = [entityLink(path.vertices[0])];
    path.edges.forEach((edge: PathEdge, i: number) => {
        const arrow = edge.direction === "forward" ? "&rarr;" : "&larr;";
        parts.push(
            `<span class="edge">${arrow} <span class="pred">${esc(edge.p)}</span> ` +
            `${confidenceBar(edge.confidence)} ${provenanceBadge(edge.provenance)} ${arrow}</span>`);
        parts.push(entityLink(path.vertices[i + 1]));
    });
    return parts.join(" ");
}

export function renderPaths(paths: ScoredPath[], maxHops: number): string {
    if (paths.length === 0) {
        return `<p class="empty">No explanation found within ${maxHops} hops.</p>`;
    }
    const items = paths.map((path, i) =>
        `<li class="path"><span class="rank">#${i + 1}</span> ${pathChain(path)}` +
        `<span class="metrics">coherence ${path.coherence.toFixed(4)}, ` +
        `mean confidence ${path.meanConfidence.toFixed(2)}</span></li>`).join("\n");
    return `<ol class="paths">\n${items}\n</ol>`;
}

function patternGraph(pattern: TrendingPattern): string {
    return pattern.edges.map((edge) =>
        `<span class="pedge"><span class="pnode">${esc(edge.srcLabel)}<sub>${edge.srcVar}</sub></span>` +
        ` &ndash;<span class="pred">${esc(edge.pred)}</span>&rarr; ` +
        `<span class="pnode">${esc(edge.dstLabel)}<sub>${edge.dstVar}</sub></span></span>`).join("<br>");
}

export function renderTrending(patterns: TrendingPattern[],
                               highlights: Set<string>): string {
    if (patterns.length === 0) {
        return `<p class="empty">No patterns in the current window.</p>`;
    }
    const cards = patterns.map((pattern) => {
        const fresh = highlights.has(pattern.code) ? " fresh" : "";
        return `<div class="pattern-card${fresh}" data-code="${esc(pattern.code)}">` +
            `${patternGraph(pattern)}` +
            `<div class="support">support ${pattern.support}` +
            `<span class="window">batches ${pattern.window.firstBatch}&ndash;${pattern.window.lastBatch}</span></div></div>`;
    }).join("\n");
    return `<div class="patterns">\n${cards}\n</div>`;
}

export function renderStaleBanner(lastUpdated: Date | null): string {
    const when = lastUpdated ? lastUpdated.toISOString() : "never";
    return `<div class="stale">Connection lost; showing data as of ${esc(when)}.</div>`;
}
