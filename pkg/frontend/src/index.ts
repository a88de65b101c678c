export * from "./protocol.js";
export * from "./http.js";
export * from "./clock.js";
export * from "./events.js";
export * from "./audio.js";
export * from "./beep.js";
export * from "./keypad.js";
export * from "./session.js";
export * from "./forms.js";
export * from "./client.js";
