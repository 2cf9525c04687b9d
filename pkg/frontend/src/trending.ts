// Trending feed: periodic polling with delta highlighting and a
// stale-data banner on connection loss.

import { TrendingPattern } from "./types.js";

export function diffEmissions(previous: TrendingPattern[] | null,
                              next: TrendingPattern[]): Set<string> {
    if (previous === null) {
        return new Set(); // first emission: nothing is "new"
    }
    const seen = new Set(previous.map((p) => p.code));
    return new Set(next.filter((p) => !seen.has(p.code)).map((p) => p.code));
}

export interface FeedView {
    patterns: TrendingPattern[];
    highlights: Set<string>;
    stale: boolean;
    lastUpdated: Date | null;
}

export class TrendingPoller {
    private last: TrendingPattern[] | null = null;
    private lastUpdated: Date | null = null;
    private timer: ReturnType<typeof setInterval> | null = null;

    constructor(
        private fetcher: () => Promise<TrendingPattern[]>,
        private onView: (view: FeedView) => void,
        private intervalMs: number = 5000,
        private clock: () => Date = () => new Date(),
    ) {}

    async poll(): Promise<void> {
        try {
            const next = await this.fetcher();
            const highlights = diffEmissions(this.last, next);
            this.last = next;
            this.lastUpdated = this.clock();
            this.onView({ patterns: next, highlights, stale: false,
                          lastUpdated: this.lastUpdated });
        } catch {
            this.onView({ patterns: this.last ?? [], highlights: new Set(),
                          stale: true, lastUpdated: this.lastUpdated });
        }
    }

    start(): void {
        void this.poll();
        this.timer = setInterval(() => void this.poll(), this.intervalMs);
    }

    stop(): void {
        if (this.timer !== null) {
            clearInterval(this.timer);
            this.timer = null;
        }
    }
}
