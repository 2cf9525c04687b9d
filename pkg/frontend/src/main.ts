// DOM wiring for the analyst UI: entity search, path explanations and the
// live trending feed, all over the documented /api endpoints.  The page
// holds no server state; a refresh rebuilds everything.

import { ApiRequestError, fetchEntity, fetchPaths, fetchTrending } from "./api.js";
import { LatestWins } from "./guard.js";
import { QueryHistory, renderHistory } from "./history.js";
import { renderEntityCard, renderEntityError, renderPaths, renderStaleBanner,
         renderTrending } from "./render.js";
import { parseQuery } from "./templates.js";
import { TrendingPoller } from "./trending.js";

const guard = new LatestWins();
const history = new QueryHistory();
const MAX_HOPS = 4;

function el<T extends HTMLElement>(id: string): T {
    const found = document.getElementById(id);
    if (!found) {
        throw new Error(`missing element #${id}`);
    }
    return found as T;
}

async function showEntity(name: string): Promise<void> {
    const token = guard.begin("entity");
    const target = el<HTMLDivElement>("entity-result");
    target.innerHTML = `<p class="loading">Looking up ${name}…</p>`;
    try {
        const card = await fetchEntity(name);
        if (!guard.isCurrent("entity", token)) {
            return; // a newer query answered already
        }
        target.innerHTML = renderEntityCard(card);
    } catch (err) {
        if (!guard.isCurrent("entity", token)) {
            return;
        }
        if (err instanceof ApiRequestError && err.status === 404) {
            target.innerHTML = renderEntityError(err.body);
        } else {
            target.innerHTML = `<p class="error">Request failed: ${String(err)}</p>`;
        }
    }
}

async function showPaths(from: string, to: string, rel: string): Promise<void> {
    const target = el<HTMLDivElement>("paths-result");
    if (from.trim().toLowerCase() === to.trim().toLowerCase()) {
        target.innerHTML = `<p class="error">Pick two different entities.</p>`;
        return;
    }
    const token = guard.begin("paths");
    target.innerHTML = `<p class="loading">Searching explanations…</p>`;
    try {
        const paths = await fetchPaths({ from, to, rel: rel || undefined,
                                         maxHops: MAX_HOPS });
        if (!guard.isCurrent("paths", token)) {
            return;
        }
        target.innerHTML = renderPaths(paths, MAX_HOPS);
    } catch (err) {
        if (!guard.isCurrent("paths", token)) {
            return;
        }
        const detail = err instanceof ApiRequestError
            ? `${err.body.error}: ${err.body.detail}`
            : String(err);
        target.innerHTML = `<p class="error">${detail}</p>`;
    }
}

function wireSearch(): void {
    const input = el<HTMLInputElement>("entity-input");
    const button = el<HTMLButtonElement>("entity-go");
    const sync = () => { button.disabled = input.value.trim() === ""; };
    input.addEventListener("input", sync);
    sync();
    const submit = () => {
        const parsed = parseQuery(input.value);
        if (!parsed) {
            return;
        }
        history.record(parsed);
        el<HTMLDivElement>("history").innerHTML = renderHistory(history);
        if (parsed.kind === "entity") {
            void showEntity(parsed.name);
        } else {
            el<HTMLInputElement>("path-from").value = parsed.from;
            el<HTMLInputElement>("path-to").value = parsed.to;
            void showPaths(parsed.from, parsed.to, parsed.rel ?? "");
        }
    };
    button.addEventListener("click", submit);
    input.addEventListener("keydown", (ev) => {
        if (ev.key === "Enter" && !button.disabled) {
            submit();
        }
    });
}

function wirePaths(): void {
    el<HTMLButtonElement>("path-go").addEventListener("click", () => {
        void showPaths(el<HTMLInputElement>("path-from").value,
                       el<HTMLInputElement>("path-to").value,
                       el<HTMLInputElement>("path-rel").value);
    });
}

function wireHistory(): void {
    el<HTMLDivElement>("history").addEventListener("click", (ev) => {
        const chip = (ev.target as HTMLElement).closest(".history-chip");
        if (!(chip instanceof HTMLElement) || !chip.dataset.history) {
            return;
        }
        const query = history.entries()[Number(chip.dataset.history)];
        if (!query) {
            return;
        }
        if (query.kind === "entity") {
            void showEntity(query.name);
        } else {
            void showPaths(query.from, query.to, query.rel ?? "");
        }
    });
}

function wireEntityLinks(): void {
    document.body.addEventListener("click", (ev) => {
        const target = (ev.target as HTMLElement).closest(".entity-link");
        if (target instanceof HTMLElement && target.dataset.entity) {
            ev.preventDefault();
            el<HTMLInputElement>("entity-input").value = target.dataset.entity;
            el<HTMLButtonElement>("entity-go").disabled = false;
            void showEntity(target.dataset.entity);
        }
    });
}

function wireTrending(): void {
    const feed = el<HTMLDivElement>("trending-result");
    const banner = el<HTMLDivElement>("trending-banner");
    const poller = new TrendingPoller(fetchTrending, (view) => {
        feed.innerHTML = renderTrending(view.patterns, view.highlights);
        banner.innerHTML = view.stale ? renderStaleBanner(view.lastUpdated) : "";
    }, 5000);
    poller.start();
}

document.addEventListener("DOMContentLoaded", () => {
    wireSearch();
    wirePaths();
    wireHistory();
    wireEntityLinks();
    wireTrending();
});
