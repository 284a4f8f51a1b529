import { AddressInfo } from "net";
import { Server } from "http";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { createApp } from "../src/app";
import {
  CLOSED_BOOK_ANSWER,
  generateStub,
  scoreStub,
  translateStub,
} from "../src/stub";

let server: Server;
let base: string;
const logLines: string[] = [];

beforeAll(async () => {
  const app = createApp({
    stub: { translateMap: { cat: "gato" } },
    log: (line) => logLines.push(line),
  });
  await new Promise<void>((resolve) => {
    server = app.listen(0, "127.0.0.1", resolve);
  });
  const { port } = server.address() as AddressInfo;
  base = `http://127.0.0.1:${port}`;
});

afterAll(() => {
  server.close();
});

async function post(path: string, body: unknown): Promise<Response> {
  return fetch(base + path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

describe("stub behaviors", () => {
  it("translates via the map when present", () => {
    expect(translateStub("cat", "es", { translateMap: { cat: "gato" } })).toBe(
      "gato",
    );
  });

  it("echoes unmapped input with the target prefix", () => {
    expect(translateStub("hello", "ja")).toBe("⟪ja⟫ hello");
  });

  it("scores identical question/candidate at 1.0", () => {
    expect(scoreStub("a b", ["a b"])).toEqual([1.0]);
  });

  it("extractive generation returns the first candidate", () => {
    expect(
      generateStub([
        { text: "A", lang: "en" },
        { text: "B", lang: "ru" },
      ]),
    ).toBe("A");
    expect(generateStub([])).toBe(CLOSED_BOOK_ANSWER);
  });
});

describe("routes", () => {
  it("GET /healthz", async () => {
    const resp = await fetch(base + "/healthz");
    expect(resp.status).toBe(200);
  });

  it("POST /translate happy path + map", async () => {
    let resp = await post("/translate", {
      text: "cat",
      source_lang: "en",
      target_lang: "es",
    });
    expect(resp.status).toBe(200);
    expect(await resp.json()).toEqual({ translation: "gato" });

    resp = await post("/translate", {
      text: "hello",
      source_lang: "en",
      target_lang: "ja",
    });
    expect(await resp.json()).toEqual({ translation: "⟪ja⟫ hello" });
  });

  it("POST /translate round-trips unicode bytes", async () => {
    const texts = [
      "ما هي عاصمة مصر؟",
      "বাংলা ভাষার প্রথম ব্যাকরণ কে রচনা করেন?",
      "ストーンズリバーの戦いによる戦死者は何人",
      "Когда закончилась Английская революция?",
    ];
    for (const text of texts) {
      const resp = await post("/translate", {
        text,
        source_lang: "xx",
        target_lang: "en",
      });
      const body = (await resp.json()) as { translation: string };
      expect(body.translation).toBe(`⟪en⟫ ${text}`);
    }
  });

  it("POST /score aligns scores with candidates", async () => {
    const resp = await post("/score", {
      question: "alpha beta",
      candidates: ["alpha beta", "alpha", "zzz"],
    });
    expect(resp.status).toBe(200);
    const body = (await resp.json()) as { scores: number[] };
    expect(body.scores).toHaveLength(3);
    expect(body.scores[0]).toBe(1.0);
    expect(body.scores[1]).toBe(0.5);
    expect(body.scores[2]).toBe(0.0);
  });

  it("POST /generate extractive and closed-book", async () => {
    let resp = await post("/generate", {
      question: "q",
      candidates: [
        { text: "first", lang: "en" },
        { text: "second", lang: "ru" },
      ],
      target_lang: "en",
      max_new_chars: 100,
    });
    expect((await resp.json()) as object).toEqual({ answer: "first" });

    resp = await post("/generate", {
      question: "q",
      candidates: [],
      target_lang: "en",
      max_new_chars: 100,
    });
    expect((await resp.json()) as object).toEqual({
      answer: CLOSED_BOOK_ANSWER,
    });
  });

  it("rejects malformed bodies with 400", async () => {
    const cases: Array<[string, unknown]> = [
      ["/translate", { text: "x" }],
      ["/translate", { text: 5, source_lang: "a", target_lang: "b" }],
      ["/score", { question: "x" }],
      ["/score", { question: "x", candidates: "nope" }],
      ["/score", { question: "x", candidates: [1, 2] }],
      ["/generate", { candidates: [] }],
      ["/generate", { question: "q", candidates: [{ text: "a" }], target_lang: "en" }],
    ];
    for (const [path, body] of cases) {
      const resp = await post(path, body);
      expect(resp.status, `${path} ${JSON.stringify(body)}`).toBe(400);
    }
  });

  it("rejects unparsable JSON with 400", async () => {
    const resp = await fetch(base + "/score", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: "{not json",
    });
    expect(resp.status).toBe(400);
  });

  it("logs every request as JSON lines", () => {
    expect(logLines.length).toBeGreaterThan(0);
    for (const line of logLines) {
      const parsed = JSON.parse(line) as { route: string };
      expect(parsed.route).toMatch(/^\/(translate|score|generate)$/);
    }
  });
});
