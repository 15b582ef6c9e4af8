import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    globalSetup: ["tests/setup/server.ts"],
    testTimeout: 30000,
    hookTimeout: 90000,
  },
});
