// UI session state and its transitions, kept pure so they are testable
// without a DOM. The chat log mirrors what the server appends to
// history during this session.

import type { QaResponse } from './api';
import type { Highlight } from './highlight';
import { codePointLength } from './offsets';

export interface ChatEntry {
  kind: 'qa' | 'error';
  question: string;
  answer?: string;
  verbatim?: boolean;
  message?: string;
}

export interface UiState {
  selectedNoteId: string | null;
  noteBody: string;
  highlight: Highlight | null;
  chat: ChatEntry[];
  suggestions: string[];
  pending: boolean;
}

export function initialState(): UiState {
  return {
    selectedNoteId: null,
    noteBody: '',
    highlight: null,
    chat: [],
    suggestions: [],
    pending: false,
  };
}

/** Selecting a note clears the highlight and stales the suggestions. */
export function noteSelected(state: UiState, noteId: string, body: string): UiState {
  return {
    ...state,
    selectedNoteId: noteId,
    noteBody: body,
    highlight: null,
    suggestions: [],
  };
}

export function suggestionsLoaded(state: UiState, suggestions: string[]): UiState {
  return { ...state, suggestions };
}

/** At most one in-flight question; returns null while one is pending. */
export function askStarted(state: UiState, question: string): UiState | null {
  if (state.pending || !state.selectedNoteId || !question.trim()) {
    return null;
  }
  return { ...state, pending: true };
}

/** Append the answer and replace (never stack) the highlight. */
export function answerReceived(state: UiState, question: string, resp: QaResponse): UiState {
  let highlight: Highlight | null = null;
  if (resp.start !== null && resp.end !== null && resp.start < resp.end) {
    const length = codePointLength(state.noteBody);
    if (resp.start >= 0 && resp.end <= length) {
      highlight = { start: resp.start, end: resp.end };
    }
  }
  const entry: ChatEntry = {
    kind: 'qa',
    question,
    answer: resp.raw,
    verbatim: resp.verbatim,
  };
  return { ...state, pending: false, highlight, chat: [...state.chat, entry] };
}

/** Errors render inline and leave the current highlight untouched. */
export function askFailed(state: UiState, question: string, message: string): UiState {
  const entry: ChatEntry = { kind: 'error', question, message };
  return { ...state, pending: false, chat: [...state.chat, entry] };
}
