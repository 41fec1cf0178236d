import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError, VersionConflictError } from "../src/api";
import conflictBody from "./fixtures/conflict_409.json";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  it("sends the If-Match header on mutations", async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      jsonResponse(200, { id: "x", version: 3, derived: {} }));
    vi.stubGlobal("fetch", fetchMock);

    const client = new ApiClient("");
    await client.putWeights(
      "x", { top_level: { labels: ["a"], values: [1] } }, 2);

    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe("/problems/x/weights");
    expect(init.method).toBe("PUT");
    expect(init.headers["If-Match"]).toBe("2");
  });

  it("raises VersionConflictError with the server version on 409", async () => {
    vi.stubGlobal("fetch", vi.fn(() => Promise.resolve(jsonResponse(409, conflictBody))));

    const client = new ApiClient("");
    const attempt = client.putWeights(
      "x", { top_level: { labels: ["a"], values: [1] } }, 1);
    await expect(attempt).rejects.toBeInstanceOf(VersionConflictError);

    try {
      await client.putWeights("x", { top_level: { labels: ["a"], values: [1] } }, 1);
    } catch (error) {
      const conflict = error as VersionConflictError;
      expect(conflict.code).toBe("version_conflict");
      expect(conflict.currentVersion).toBe(4);
      expect(conflict.location).toBe("If-Match");
    }
  });

  it("maps structured error bodies onto ApiError", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(jsonResponse(422, {
      code: "validation_failed",
      message: "top-level weights sum 1.10 != 1",
      location: "document",
    })));

    const client = new ApiClient("");
    try {
      await client.getRanking("x");
      expect.unreachable("should have thrown");
    } catch (error) {
      const failure = error as ApiError;
      expect(failure).toBeInstanceOf(ApiError);
      expect(failure.status).toBe(422);
      expect(failure.code).toBe("validation_failed");
      expect(failure.message).toContain("1.10");
    }
  });

  it("prefixes the configured base url", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(200, { problems: [] }));
    vi.stubGlobal("fetch", fetchMock);

    await new ApiClient("http://localhost:8080").listProblems();
    expect(fetchMock.mock.calls[0][0]).toBe("http://localhost:8080/problems");
  });
});
