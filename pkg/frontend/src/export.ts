// Truth export. The serialized form must be byte-identical to what the
// server itself writes (sorted keys, two-space indent, ASCII-escaped,
// newline-terminated), so a client export and a server round trip of the
// same labels produce the same file.

import { TruthPage } from './session.js';

type JsonValue =
  | null
  | boolean
  | number
  | string
  | JsonValue[]
  | { [key: string]: JsonValue };

const SHORT_ESCAPES: Record<string, string> = {
  '"': '\\"',
  '\\': '\\\\',
  '\b': '\\b',
  '\f': '\\f',
  '\n': '\\n',
  '\r': '\\r',
  '\t': '\\t',
};

function escapeString(value: string): string {
  let out = '"';
  for (const unit of value) {
    const short = SHORT_ESCAPES[unit];
    if (short !== undefined) {
      out += short;
    } else {
      const code = unit.codePointAt(0) as number;
      if (code >= 0x20 && code <= 0x7e) {
        out += unit;
      } else if (code > 0xffff) {
        // astral characters escape as a surrogate pair
        out += `\\u${unit.charCodeAt(0).toString(16).padStart(4, '0')}`;
        out += `\\u${unit.charCodeAt(1).toString(16).padStart(4, '0')}`;
      } else {
        out += `\\u${code.toString(16).padStart(4, '0')}`;
      }
    }
  }
  return out + '"';
}

function writeValue(value: JsonValue, indent: string): string {
  if (value === null) {
    return 'null';
  }
  if (typeof value === 'boolean') {
    return value ? 'true' : 'false';
  }
  if (typeof value === 'number') {
    // floats round-trip differently across languages; the shared schemas
    // only ever export integers, so refuse anything else
    if (!Number.isInteger(value)) {
      throw new Error(`canonical JSON only serializes integers, got ${value}`);
    }
    return String(value);
  }
  if (typeof value === 'string') {
    return escapeString(value);
  }
  const deeper = indent + '  ';
  if (Array.isArray(value)) {
    if (value.length === 0) {
      return '[]';
    }
    const items = value.map((item) => deeper + writeValue(item, deeper));
    return '[\n' + items.join(',\n') + '\n' + indent + ']';
  }
  const keys = Object.keys(value).sort();
  if (keys.length === 0) {
    return '{}';
  }
  const items = keys.map(
    (key) => `${deeper}${escapeString(key)}: ${writeValue(value[key], deeper)}`,
  );
  return '{\n' + items.join(',\n') + '\n' + indent + '}';
}

/** Serialize with the byte-stable conventions shared across components. */
export function canonicalJson(value: JsonValue): string {
  return writeValue(value, '') + '\n';
}

export function truthJson(truth: TruthPage): string {
  return canonicalJson(truth as unknown as JsonValue);
}

export interface PostResult {
  ok: boolean;
  status: number;
  /** Server-reported error detail, when the post was rejected. */
  error?: string;
  /** True when the request never reached the server. */
  network?: boolean;
}

/** POST the exported truth for a page; never throws. */
export async function postTruth(pageId: string, truth: TruthPage): Promise<PostResult> {
  let response: Response;
  try {
    response = await fetch(`/truth/${encodeURIComponent(pageId)}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: truthJson(truth),
    });
  } catch {
    return { ok: false, status: 0, network: true };
  }
  if (response.ok) {
    return { ok: true, status: response.status };
  }
  let detail = '';
  try {
    const payload = (await response.json()) as { error?: string };
    detail = payload.error ?? '';
  } catch {
    // non-JSON error body; keep the status alone
  }
  return { ok: false, status: response.status, error: detail };
}
