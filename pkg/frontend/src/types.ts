/** JSON shapes served by the session service (schema version 1). */

export interface CreateSessionResponse {
  v: number;
  id: string;
  threshold: number;
  first_setting: string;
}

export interface HistoryEntry {
  setting: string;
  value: number;
  stderr: number | null;
  sum: number;
}

export interface SessionView {
  v: number;
  id: string;
  n_qubits: number;
  threshold: number;
  mode: string;
  created_at: number;
  status: "running" | "entangled" | "exhausted";
  sum: number;
  history: HistoryEntry[];
  next_setting: string | null;
}

export interface RecordResponse {
  v: number;
  status: SessionView["status"];
  sum: number;
  next_setting: string | null;
}

export interface WhatifResponse {
  v: number;
  sum: number;
  status: SessionView["status"];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}
