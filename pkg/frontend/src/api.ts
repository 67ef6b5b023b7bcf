// Typed client for the QA service JSON API (same-origin by default).

export interface NoteSummary {
  id: string;
  title: string;
  body_preview: string;
}

export interface ClinicalNote {
  id: string;
  title: string;
  body: string;
  meta: Record<string, string>;
}

export interface QaResponse {
  raw: string;
  start: number | null; // code-point offsets into the note body
  end: number | null;
  verbatim: boolean;
  score: number;
}

export interface HistoryEntry {
  ts: string;
  note_id: string;
  question: string;
  answer: QaResponse;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

let apiBase = '';

export function setApiBase(base: string): void {
  apiBase = base.replace(/\/+$/, '');
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(apiBase + path, init);
  if (!resp.ok) {
    let code = 'http_error';
    let message = `${resp.status} ${resp.statusText}`;
    try {
      const body = (await resp.json()) as { code?: string; message?: string };
      if (body.code) code = body.code;
      if (body.message) message = body.message;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, code, message);
  }
  return (await resp.json()) as T;
}

export function listNotes(): Promise<NoteSummary[]> {
  return request('/api/notes');
}

export function getNote(id: string): Promise<ClinicalNote> {
  return request(`/api/notes/${encodeURIComponent(id)}`);
}

export function getSuggestions(id: string, n = 4): Promise<string[]> {
  return request(`/api/notes/${encodeURIComponent(id)}/suggestions?n=${n}`);
}

export function askQuestion(noteId: string, question: string): Promise<QaResponse> {
  return request('/api/qa', {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify({ note_id: noteId, question }),
  });
}

export function getHistory(): Promise<HistoryEntry[]> {
  return request('/api/history');
}

export function historyExportUrl(): string {
  return apiBase + '/api/history/export';
}
