import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    environmentOptions: {
      // Same origin as the live api-service tests spawn, so the in-page
      // fetches behave like a deployment where the UI is served next to
      // the API. Cross-origin deployments use `goalnet serve --cors-origin`.
      happyDOM: { url: "http://127.0.0.1:8791" },
    },
    include: ["tests/**/*.test.ts"],
    testTimeout: 30_000,
    hookTimeout: 30_000,
  },
});
