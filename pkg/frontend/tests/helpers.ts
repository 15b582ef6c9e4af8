import type { FetchLike, Point } from "../src/api.js";

// deterministic wobbly closed outline for trace input
export function blobPoints(count: number, seed = 0): Point[] {
  const points: Point[] = [];
  for (let k = 0; k < count; k++) {
    const t = (2 * Math.PI * k) / count;
    const r =
      1 + 0.3 * Math.sin(3 * t + seed) + 0.15 * Math.cos(5 * t + 2 * seed);
    points.push([r * Math.cos(t), r * Math.sin(t)]);
  }
  return points;
}

export type StubCall = { method: string; url: string; body: unknown };

export type StubRoute = {
  method: string;
  path: RegExp;
  handler: (
    body: unknown,
    match: RegExpMatchArray,
  ) => { status?: number; body: unknown };
};

export function stubFetch(routes: StubRoute[], calls: StubCall[]): FetchLike {
  return async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body === undefined ? undefined : JSON.parse(init.body);
    calls.push({ method, url, body });
    for (const route of routes) {
      const match = url.match(route.path);
      if (route.method === method && match !== null) {
        const result = route.handler(body, match);
        return {
          status: result.status ?? 200,
          json: async () => result.body,
        };
      }
    }
    throw new Error(`stub has no route for ${method} ${url}`);
  };
}

export type RecordedExchange = { method: string; url: string; response: unknown };

// pass-through fetch that keeps every raw response body, so tests can check
// the UI state against exactly what the server sent
export function recordingFetch(log: RecordedExchange[]): FetchLike {
  return async (url, init) => {
    const response = await fetch(url, init as RequestInit);
    const payload = await response.json();
    log.push({ method: init?.method ?? "GET", url, response: payload });
    return { status: response.status, json: async () => payload };
  };
}
