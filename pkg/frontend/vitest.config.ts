import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the loopback suite boots a real server process
    testTimeout: 60000,
    hookTimeout: 60000,
  },
});
