import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    hookTimeout: 90_000,
    testTimeout: 90_000,
  },
});
