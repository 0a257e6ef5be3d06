import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // The e2e suite boots the Python service; give it room.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
