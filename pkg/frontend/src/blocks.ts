// Block enumeration over the live document. The paths and hashes produced
// here must equal the server's /api/blocks output for the same snapshot
// field-for-field, so the walk mirrors the extraction pipeline exactly:
// same path grammar, same exclusion list, same normalization and hash.

import { fnv1a64, normalizeText } from './hash.js';

export interface PageBlock {
  index: number;
  dom_path: string;
  text_hash: string;
  text: string;
}

/** A block together with the text node it was read from. */
export interface BlockEntry {
  block: PageBlock;
  node: Text;
}

// Subtrees whose text is never a block.
export const EXCLUDED_TAGS = new Set([
  'script',
  'style',
  'noscript',
  'template',
  'iframe',
]);

// Marks every element the overlay adds. Marked elements (and their
// subtrees) are invisible to the walk, so injecting the UI cannot shift
// any path or index of the underlying snapshot.
export const OVERLAY_ATTR = 'data-boilercut-overlay';

interface Frame {
  children: NodeListOf<ChildNode>;
  next: number;
  prefix: string;
  excluded: boolean;
  tagCounts: Map<string, number>;
  textCount: number;
}

function frame(element: Element, prefix: string, excluded: boolean): Frame {
  return {
    children: element.childNodes,
    next: 0,
    prefix,
    excluded,
    tagCounts: new Map(),
    textCount: 0,
  };
}

/**
 * Walk the document and collect every classifiable text block in document
 * order, keeping a handle on the backing text node for overlay placement.
 *
 * Bracketed indices are 1-based: `p[2]` counts same-tag element siblings,
 * `#text[3]` counts all text-node children of the parent. Whitespace-only
 * text nodes are never emitted but still occupy their `#text` slot.
 * Iterative on an explicit stack: malformed pages can nest arbitrarily deep.
 */
export function collectBlocks(doc: Document): BlockEntry[] {
  const entries: BlockEntry[] = [];
  const root = doc.documentElement;
  if (!root) {
    return entries;
  }
  const stack: Frame[] = [frame(root, '/html[1]', false)];
  while (stack.length > 0) {
    const top = stack[stack.length - 1];
    const child = top.children[top.next];
    top.next += 1;
    if (child === undefined) {
      stack.pop();
      continue;
    }
    if (child.nodeType === Node.TEXT_NODE) {
      top.textCount += 1; // whitespace-only nodes keep their slot
      if (top.excluded) {
        continue;
      }
      const text = normalizeText(child.nodeValue ?? '');
      if (text === '') {
        continue;
      }
      entries.push({
        block: {
          index: entries.length,
          dom_path: `${top.prefix}/#text[${top.textCount}]`,
          text_hash: fnv1a64(text),
          text,
        },
        node: child as Text,
      });
    } else if (child.nodeType === Node.ELEMENT_NODE) {
      const el = child as Element;
      if (el.hasAttribute(OVERLAY_ATTR)) {
        continue; // our own UI is not part of the snapshot
      }
      const tag = el.tagName.toLowerCase();
      const k = (top.tagCounts.get(tag) ?? 0) + 1;
      top.tagCounts.set(tag, k);
      stack.push(
        frame(el, `${top.prefix}/${tag}[${k}]`, top.excluded || EXCLUDED_TAGS.has(tag)),
      );
    }
    // comments and doctypes are skipped; the parser already split text
    // runs around them, which is what keeps #text indices aligned
  }
  return entries;
}

/** The block list alone, as compared against the server's /api/blocks. */
export function enumerateBlocks(doc: Document): PageBlock[] {
  return collectBlocks(doc).map((entry) => entry.block);
}
