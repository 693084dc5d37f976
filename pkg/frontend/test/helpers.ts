import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { RequestEnvelope, ResponsePayload } from "../src/types";

export const REPO_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..", "..");
export const GOLDEN = join(REPO_ROOT, "tests", "golden");
export const CORPUS = join(REPO_ROOT, "corpus", "rotlog");

export function transcript(name: string): Array<[RequestEnvelope, ResponsePayload]> {
  const parse = (suffix: string) =>
    readFileSync(join(GOLDEN, "transcripts", `${name}.${suffix}.ndjson`), "utf-8")
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line));
  const requests = parse("in");
  const responses = parse("out");
  return requests.map((request, i) => [request, responses[i]]);
}

export function featureModelResponse(): ResponsePayload {
  return transcript("load")[0][1];
}

/** A fetch stand-in that answers from a scripted queue. */
export function scriptedFetch(script: Array<(body: RequestEnvelope | null) => unknown>) {
  const seen: Array<RequestEnvelope | null> = [];
  const impl = async (_url: string, init?: RequestInit) => {
    const body = init?.body ? (JSON.parse(String(init.body)) as RequestEnvelope) : null;
    seen.push(body);
    const step = script.shift();
    if (!step) throw new Error("scripted fetch exhausted");
    const payload = step(body);
    return {
      status: 200,
      json: async () => payload,
    } as Response;
  };
  return { impl, seen };
}
