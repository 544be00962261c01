// Text identity shared with the extraction pipeline: blocks match across
// components only if normalization and hashing are bit-identical here and
// there. Keep both functions boring and exact.

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const MASK64 = 0xffffffffffffffffn;

const utf8 = new TextEncoder();

/** 64-bit FNV-1a over the UTF-8 bytes of `text`, as 16 lowercase hex digits. */
export function fnv1a64(text: string): string {
  let h = FNV_OFFSET;
  for (const byte of utf8.encode(text)) {
    h ^= BigInt(byte);
    h = (h * FNV_PRIME) & MASK64;
  }
  return h.toString(16).padStart(16, '0');
}

// Whitespace exactly as Python's str.split() classifies it. This differs
// from \s in both directions: it includes U+001C..001F and U+0085, and it
// excludes U+FEFF. Built from escapes so the source stays ASCII (a literal
// U+2028 is a line terminator and cannot sit inside a regex literal).
const WHITESPACE_RUN = new RegExp(
  '[\\t\\n\\x0b\\f\\r\\x1c-\\x1f \\x85\\xa0\\u1680\\u2000-\\u200a' +
    '\\u2028\\u2029\\u202f\\u205f\\u3000]+',
  'g',
);

/** Collapse whitespace runs to single spaces and strip the ends. */
export function normalizeText(raw: string): string {
  return raw
    .split(WHITESPACE_RUN)
    .filter((part) => part.length > 0)
    .join(' ');
}
