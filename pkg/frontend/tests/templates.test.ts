import { describe, expect, it } from "vitest";

import { parseQuery } from "../src/templates.js";

describe("query templates", () => {
    it("tell me about X routes to entity lookup", () => {
        expect(parseQuery("Tell me about DJI"))
            .toEqual({ kind: "entity", name: "DJI" });
        expect(parseQuery("tell me about phantom 3?"))
            .toEqual({ kind: "entity", name: "phantom 3" });
    });

    it("why is X related to Y routes to path search", () => {
        expect(parseQuery("why is Windermere related to DJI"))
            .toEqual({ kind: "paths", from: "Windermere", to: "DJI" });
    });

    it("why may X use Y matches the use-case phrasing", () => {
        expect(parseQuery("why may Windermere employ drones"))
            .toEqual({ kind: "paths", from: "Windermere", to: "drones" });
    });

    it("how is X connected to Y via R carries the constraint", () => {
        expect(parseQuery("how is amazon connected to drone via sells"))
            .toEqual({ kind: "paths", from: "amazon", to: "drone",
                       rel: "sells" });
    });

    it("bare text is an entity lookup", () => {
        expect(parseQuery("dji")).toEqual({ kind: "entity", name: "dji" });
    });

    it("blank input is rejected", () => {
        expect(parseQuery("   ")).toBeNull();
    });
});
