export * from "./types.js";
export * from "./templates.js";
export * from "./providers.js";
export * from "./runner.js";
export * from "./aggregate.js";
