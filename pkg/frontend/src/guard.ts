// Latest-wins guard for concurrent in-flight requests, keyed by query
// kind.  A response may only render if it still carries the newest token
// for its key, so a slow response for an old query can never overwrite
// the results of a newer one.

export class LatestWins {
    private seq = new Map<string, number>();

    begin(key: string): number {
        const next = (this.seq.get(key) ?? 0) + 1;
        this.seq.set(key, next);
        return next;
    }

    isCurrent(key: string, token: number): boolean {
        return this.seq.get(key) === token;
    }
}
