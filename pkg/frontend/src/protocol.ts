// Wire types for the session service: HTTP bodies and the realtime
// stream messages.  Everything that crosses the network is validated
// here so the rest of the client can trust its inputs.

import { z } from "zod";

export const ViewSchema = z.object({
  mode: z.string(),
  scene: z.string(),
  phase: z.number().int().nullable(),
  clock_ms: z.number().int(),
  phase_remaining_ms: z.number().int().nullable(),
  pause_remaining_ms: z.number().int().nullable(),
  problem: z.string().nullable(),
  entry: z.string(),
  line_position: z.number().nullable(),
  line_low: z.number().nullable(),
  line_high: z.number().nullable(),
  show_tlx: z.boolean(),
  show_paas: z.boolean(),
  exports_ready: z.boolean(),
});

export type View = z.infer<typeof ViewSchema>;

export const SnapshotMessageSchema = z.object({
  type: z.literal("snapshot"),
  session_ms: z.number(),
  view: ViewSchema,
});

export const BeepMessageSchema = z.object({
  type: z.literal("beep"),
  onset_ms: z.number(),
  index: z.number().int(),
});

export const FinishedMessageSchema = z.object({
  type: z.literal("finished"),
  session_ms: z.number(),
});

export const ServerMessageSchema = z.discriminatedUnion("type", [
  SnapshotMessageSchema,
  BeepMessageSchema,
  FinishedMessageSchema,
]);

export type SnapshotMessage = z.infer<typeof SnapshotMessageSchema>;
export type BeepMessage = z.infer<typeof BeepMessageSchema>;
export type FinishedMessage = z.infer<typeof FinishedMessageSchema>;
export type ServerMessage = z.infer<typeof ServerMessageSchema>;

export function parseServerMessage(raw: string): ServerMessage {
  return ServerMessageSchema.parse(JSON.parse(raw));
}

export const TimeReplySchema = z.object({
  t0_ms: z.number(),
  t1_ms: z.number(),
  t2_ms: z.number(),
});

export type TimeReply = z.infer<typeof TimeReplySchema>;

export const EventAckSchema = z.object({
  accepted: z.boolean(),
  duplicate: z.boolean(),
  session_ms: z.number(),
  emitted: z.array(z.string()),
});

export type EventAck = z.infer<typeof EventAckSchema>;

export const SessionCreatedSchema = z.object({
  id: z.string(),
});

export interface TlxPayload {
  mental: number;
  physical: number;
  temporal: number;
  performance: number;
  effort: number;
  frustration: number;
}

export interface PaasPayload {
  difficulty: number;
  effort: number;
}

export interface EventBody {
  kind: string;
  client_at_ms: number;
  offset_ms: number;
  key?: string | null;
  tlx?: TlxPayload | null;
  paas?: PaasPayload | null;
  idempotency_key?: string | null;
}
