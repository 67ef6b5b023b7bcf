import { afterEach, describe, expect, it, vi } from 'vitest';

import {
  ApiError,
  askQuestion,
  getHistory,
  getNote,
  historyExportUrl,
  listNotes,
  setApiBase,
} from '../src/api';

function jsonResponse(body: unknown, status = 200) {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
  setApiBase('');
});

describe('api client', () => {
  it('lists notes', async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      jsonResponse([{ id: 'n1', title: 't', body_preview: 'p' }]),
    );
    vi.stubGlobal('fetch', fetchMock);
    const notes = await listNotes();
    expect(fetchMock).toHaveBeenCalledWith('/api/notes', undefined);
    expect(notes[0]?.id).toBe('n1');
  });

  it('posts questions with the expected payload', async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      jsonResponse({ raw: 'bcd', start: 1, end: 4, verbatim: true, score: 1 }),
    );
    vi.stubGlobal('fetch', fetchMock);
    const resp = await askQuestion('n1', 'what?');
    expect(resp.verbatim).toBe(true);
    const [url, init] = fetchMock.mock.calls[0] as [string, RequestInit];
    expect(url).toBe('/api/qa');
    expect(init.method).toBe('POST');
    expect(JSON.parse(init.body as string)).toEqual({ note_id: 'n1', question: 'what?' });
  });

  it('surfaces the server error shape as ApiError', async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      jsonResponse({ code: 'note_not_found', message: 'nope' }, 404),
    );
    vi.stubGlobal('fetch', fetchMock);
    await expect(getNote('zzz')).rejects.toMatchObject({
      name: 'ApiError',
      status: 404,
      code: 'note_not_found',
    });
  });

  it('copes with non-JSON error bodies', async () => {
    const fetchMock = vi.fn().mockResolvedValue(new Response('boom', { status: 500 }));
    vi.stubGlobal('fetch', fetchMock);
    const error = await getHistory().catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).code).toBe('http_error');
  });

  it('escapes note ids in URLs', async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse({ id: 'a/b', title: '', body: 'x', meta: {} }));
    vi.stubGlobal('fetch', fetchMock);
    await getNote('a/b');
    expect(fetchMock.mock.calls[0]?.[0]).toBe('/api/notes/a%2Fb');
  });

  it('prefixes a configured API base', async () => {
    setApiBase('http://localhost:8080/');
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse([]));
    vi.stubGlobal('fetch', fetchMock);
    await listNotes();
    expect(fetchMock.mock.calls[0]?.[0]).toBe('http://localhost:8080/api/notes');
    expect(historyExportUrl()).toBe('http://localhost:8080/api/history/export');
  });
});
