/**
 * Express app implementing the backend wire protocol.
 *
 * POST /translate {text, source_lang, target_lang} -> {translation}
 * POST /score     {question, candidates: [string]} -> {scores: [number]}
 * POST /generate  {question, candidates: [{text, lang}], target_lang,
 *                  max_new_chars?}                 -> {answer}
 *
 * Responses are deterministic functions of the request body and the stub
 * config. Malformed bodies get a 400 with an error message. Every request
 * is logged as one JSON line for conformance checks.
 */

import express, { Express, NextFunction, Request, Response } from "express";

import { generateStub, scoreStub, StubConfig, translateStub, WireCandidate } from "./stub";

export interface AppOptions {
  stub?: StubConfig;
  log?: (line: string) => void;
}

function badRequest(res: Response, message: string): void {
  res.status(400).json({ error: message });
}

function isString(x: unknown): x is string {
  return typeof x === "string";
}

export function createApp(options: AppOptions = {}): Express {
  const stub = options.stub ?? {};
  const log = options.log ?? ((line: string) => console.log(line));
  const app = express();
  app.use(express.json({ limit: "5mb" }));

  app.use((req: Request, _res: Response, next: NextFunction) => {
    if (req.method === "POST") {
      log(JSON.stringify({ route: req.path, body: req.body }));
    }
    next();
  });

  app.get("/healthz", (_req: Request, res: Response) => {
    res.json({ status: "ok" });
  });

  app.post("/translate", (req: Request, res: Response) => {
    const { text, source_lang, target_lang } = req.body ?? {};
    if (!isString(text)) return badRequest(res, "text must be a string");
    if (!isString(source_lang) || !isString(target_lang)) {
      return badRequest(res, "source_lang and target_lang are required");
    }
    res.json({ translation: translateStub(text, target_lang, stub) });
  });

  app.post("/score", (req: Request, res: Response) => {
    const { question, candidates } = req.body ?? {};
    if (!isString(question)) {
      return badRequest(res, "question must be a string");
    }
    if (!Array.isArray(candidates) || !candidates.every(isString)) {
      return badRequest(res, "candidates must be a list of strings");
    }
    res.json({ scores: scoreStub(question, candidates) });
  });

  app.post("/generate", (req: Request, res: Response) => {
    const { question, candidates, target_lang } = req.body ?? {};
    if (!isString(question)) {
      return badRequest(res, "question must be a string");
    }
    if (!isString(target_lang)) {
      return badRequest(res, "target_lang must be a string");
    }
    if (
      !Array.isArray(candidates) ||
      !candidates.every(
        (c: unknown): c is WireCandidate =>
          typeof c === "object" && c !== null &&
          isString((c as WireCandidate).text) &&
          isString((c as WireCandidate).lang),
      )
    ) {
      return badRequest(res, "candidates must be a list of {text, lang}");
    }
    res.json({ answer: generateStub(candidates) });
  });

  // express-json parse failures land here
  app.use((err: Error, _req: Request, res: Response, next: NextFunction) => {
    if (res.headersSent) return next(err);
    badRequest(res, `invalid JSON body: ${err.message}`);
  });

  return app;
}
