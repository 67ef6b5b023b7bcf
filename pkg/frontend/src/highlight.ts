// Split a note body into plain/marked segments for rendering. Joining
// the segment texts back together always reproduces the body exactly.

import { codePointToUtf16 } from './offsets';

export interface Highlight {
  start: number; // code points, end exclusive
  end: number;
}

export interface Segment {
  text: string;
  marked: boolean;
}

export function computeSegments(body: string, span: Highlight | null): Segment[] {
  if (!span) {
    return [{ text: body, marked: false }];
  }
  const start = codePointToUtf16(body, span.start);
  const end = codePointToUtf16(body, span.end);
  if (start >= end || start >= body.length) {
    return [{ text: body, marked: false }];
  }
  const segments: Segment[] = [];
  if (start > 0) {
    segments.push({ text: body.slice(0, start), marked: false });
  }
  segments.push({ text: body.slice(start, end), marked: true });
  if (end < body.length) {
    segments.push({ text: body.slice(end), marked: false });
  }
  return segments;
}

export function strippedText(segments: Segment[]): string {
  return segments.map((s) => s.text).join('');
}
