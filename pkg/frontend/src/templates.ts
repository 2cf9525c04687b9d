// Client-side templates mapping natural-language-like phrasings onto the
// two structured query kinds.  Anything unrecognized is treated as an
// entity lookup.

export type ParsedQuery =
    | { kind: "entity"; name: string }
    | { kind: "paths"; from: string; to: string; rel?: string };

const TELL_ME = /^(?:tell me about|who is|what is)\s+(.+?)\s*\??$/i;
const WHY_RELATED =
    /^why (?:is|are|does|do|would|may|might)?\s*(.+?)\s+(?:related to|connected to|linked to|employ(?:ing)?|use|using)\s+(.+?)\s*\??$/i;
const HOW_VIA = /^how (?:is|are)\s+(.+?)\s+(?:related|connected|linked)\s+to\s+(.+?)(?:\s+via\s+(\S+))?\s*\??$/i;

export function parseQuery(raw: string): ParsedQuery | null {
    const text = raw.trim();
    if (!text) {
        return null;
    }
    let m = TELL_ME.exec(text);
    if (m) {
        return { kind: "entity", name: m[1] };
    }
    m = HOW_VIA.exec(text);
    if (m) {
        return { kind: "paths", from: m[1], to: m[2], rel: m[3] || undefined };
    }
    m = WHY_RELATED.exec(text);
    if (m) {
        return { kind: "paths", from: m[1], to: m[2] };
    }
    return { kind: "entity", name: text };
}
