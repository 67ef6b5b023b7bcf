import { describe, expect, it } from 'vitest';

import type { QaResponse } from '../src/api';
import {
  answerReceived,
  askFailed,
  askStarted,
  initialState,
  noteSelected,
  suggestionsLoaded,
} from '../src/state';

const RESP_SPAN: QaResponse = { raw: 'bcd', start: 1, end: 4, verbatim: true, score: 1.0 };
const RESP_NO_SPAN: QaResponse = { raw: 'paraphrase', start: null, end: null, verbatim: false, score: 0 };

function selected() {
  return noteSelected(initialState(), 'n1', 'abcde');
}

describe('note selection', () => {
  it('clears highlight and suggestions', () => {
    let state = selected();
    state = suggestionsLoaded(state, ['q1?']);
    state = answerReceived(state, 'q?', RESP_SPAN);
    expect(state.highlight).not.toBeNull();

    const next = noteSelected(state, 'n2', 'other body');
    expect(next.highlight).toBeNull();
    expect(next.suggestions).toEqual([]);
    expect(next.noteBody).toBe('other body');
    // session chat log is preserved across note switches
    expect(next.chat).toHaveLength(1);
  });
});

describe('asking', () => {
  it('enforces a single in-flight request', () => {
    const started = askStarted(selected(), 'q?');
    expect(started).not.toBeNull();
    expect(started!.pending).toBe(true);
    expect(askStarted(started!, 'another?')).toBeNull();
  });

  it('rejects blank questions and missing note', () => {
    expect(askStarted(selected(), '   ')).toBeNull();
    expect(askStarted(initialState(), 'q?')).toBeNull();
  });

  it('applies the answer span as the new highlight', () => {
    const state = answerReceived(askStarted(selected(), 'q?')!, 'q?', RESP_SPAN);
    expect(state.pending).toBe(false);
    expect(state.highlight).toEqual({ start: 1, end: 4 });
    expect(state.chat).toEqual([
      { kind: 'qa', question: 'q?', answer: 'bcd', verbatim: true },
    ]);
  });

  it('replaces a previous highlight instead of stacking', () => {
    let state = answerReceived(selected(), 'q1?', RESP_SPAN);
    state = answerReceived(state, 'q2?', { raw: 'e', start: 4, end: 5, verbatim: true, score: 1 });
    expect(state.highlight).toEqual({ start: 4, end: 5 });
  });

  it('clears the highlight when no span comes back', () => {
    let state = answerReceived(selected(), 'q1?', RESP_SPAN);
    state = answerReceived(state, 'q2?', RESP_NO_SPAN);
    expect(state.highlight).toBeNull();
    expect(state.chat[1]).toMatchObject({ verbatim: false });
  });

  it('ignores spans outside the note length', () => {
    const state = answerReceived(selected(), 'q?', { raw: 'x', start: 3, end: 99, verbatim: false, score: 0.8 });
    expect(state.highlight).toBeNull();
  });

  it('measures span bounds in code points', () => {
    const base = noteSelected(initialState(), 'n1', '\u{1f9ec}\u{1f9ec}\u{1f9ec}'); // 3 code points, 6 UTF-16 units
    const state = answerReceived(base, 'q?', { raw: 'x', start: 0, end: 3, verbatim: true, score: 1 });
    expect(state.highlight).toEqual({ start: 0, end: 3 });
  });

  it('errors render inline and keep the highlight', () => {
    let state = answerReceived(selected(), 'q1?', RESP_SPAN);
    state = askFailed(state, 'q2?', 'upstream_llm_failure: boom');
    expect(state.pending).toBe(false);
    expect(state.highlight).toEqual({ start: 1, end: 4 });
    expect(state.chat[1]).toEqual({
      kind: 'error',
      question: 'q2?',
      message: 'upstream_llm_failure: boom',
    });
  });
});
