// Server span offsets count Unicode code points; browser strings are
// UTF-16, so offsets must be widened past any astral-plane characters.

export function codePointToUtf16(text: string, cpOffset: number): number {
  if (cpOffset <= 0) return 0;
  let seen = 0;
  let i = 0;
  while (i < text.length && seen < cpOffset) {
    const code = text.codePointAt(i);
    i += code !== undefined && code > 0xffff ? 2 : 1;
    seen += 1;
  }
  return i;
}

export function codePointLength(text: string): number {
  let n = 0;
  for (let i = 0; i < text.length; ) {
    const code = text.codePointAt(i);
    i += code !== undefined && code > 0xffff ? 2 : 1;
    n += 1;
  }
  return n;
}
