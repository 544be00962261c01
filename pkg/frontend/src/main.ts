// Entry point, injected into served snapshots as /static/main.js. Reads the
// page id from the URL, enumerates the blocks, cross-checks them against the
// server's own extraction, and mounts the tagging overlay.

import { collectBlocks, PageBlock } from './blocks.js';
import { postTruth } from './export.js';
import { mountOverlay } from './overlay.js';
import { Label, TagSession } from './session.js';

/** The `<id>` of a `/page/<id>` URL, or null elsewhere. */
export function pageIdFromPath(pathname: string): string | null {
  const match = /^\/page\/([^/]+)$/.exec(pathname);
  return match ? decodeURIComponent(match[1]) : null;
}

/**
 * Compare locally enumerated blocks with the server's /api/blocks view of
 * the same snapshot. Any difference means the two extraction walks have
 * drifted apart and labels could attach to the wrong blocks.
 */
export function parityMismatches(local: PageBlock[], server: PageBlock[]): string[] {
  const key = (b: PageBlock): string => `${b.dom_path} ${b.text_hash}`;
  const localKeys = new Set(local.map(key));
  const serverKeys = new Set(server.map(key));
  const report: string[] = [];
  for (const k of localKeys) {
    if (!serverKeys.has(k)) {
      report.push(`only in page: ${k}`);
    }
  }
  for (const k of serverKeys) {
    if (!localKeys.has(k)) {
      report.push(`only on server: ${k}`);
    }
  }
  return report;
}

async function fetchServerBlocks(pageId: string): Promise<PageBlock[]> {
  const response = await fetch(`/api/blocks/${encodeURIComponent(pageId)}`);
  if (!response.ok) {
    throw new Error(`/api/blocks returned ${response.status}`);
  }
  const payload = (await response.json()) as { blocks: PageBlock[] };
  return payload.blocks;
}

/** Pull previously saved truth, if any, into the session. */
async function restoreSaved(pageId: string, session: TagSession): Promise<number> {
  let response: Response;
  try {
    response = await fetch(`/truth/${encodeURIComponent(pageId)}`);
  } catch {
    return 0;
  }
  if (!response.ok) {
    return 0;
  }
  const saved = (await response.json()) as {
    blocks: { dom_path: string; text_hash: string; label: Label }[];
  };
  const hashes = new Map(session.blocks.map((b) => [b.dom_path, b.text_hash]));
  let restored = 0;
  for (const block of saved.blocks) {
    if (hashes.get(block.dom_path) === block.text_hash) {
      session.setState(block.dom_path, block.label);
      restored += 1;
    }
  }
  return restored;
}

async function start(): Promise<void> {
  const pageId = pageIdFromPath(window.location.pathname);
  if (pageId === null) {
    return;
  }
  const entries = collectBlocks(document);
  const session = new TagSession(pageId, entries.map((e) => e.block));
  const handles = mountOverlay(document, session, entries, {
    post: (truth) => postTruth(pageId, truth),
    confirm: (text) => window.confirm(text),
  });

  const restored = await restoreSaved(pageId, session);
  if (restored > 0) {
    handles.repaint();
    handles.notify(`restored ${restored} saved labels`);
  }

  try {
    const mismatches = parityMismatches(
      session.blocks,
      await fetchServerBlocks(pageId),
    );
    if (mismatches.length > 0) {
      console.error('block parity failure', mismatches);
      handles.notify(`block mismatch with server (${mismatches.length})`, 'error');
    }
  } catch (err) {
    console.warn('parity check skipped:', err);
  }
}

if (document.readyState === 'loading') {
  document.addEventListener('DOMContentLoaded', () => {
    void start();
  });
} else {
  void start();
}
