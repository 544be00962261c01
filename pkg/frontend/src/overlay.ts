// The in-page tagging UI. One positioned hit box per text block carries the
// hover highlight and the click cycle; a status bar shows progress and owns
// the export button. Every element created here is marked with the reserved
// overlay attribute, and the snapshot DOM is never touched otherwise.

import { BlockEntry, OVERLAY_ATTR } from './blocks.js';
import { PostResult } from './export.js';
import { BlockState, TagSession, TruthPage } from './session.js';

export interface OverlayHooks {
  /** Ship the exported truth; wrapped so tests can substitute transport. */
  post: (truth: TruthPage) => Promise<PostResult>;
  /** Ask the user a yes/no question (partial export, network retry). */
  confirm: (message: string) => boolean;
}

export interface OverlayHandles {
  root: HTMLElement;
  bar: HTMLElement;
  boxes: Map<string, HTMLElement>;
  hovered(): string | null;
  notify(text: string, kind?: '' | 'warn' | 'error'): void;
  /** Re-read every block state from the session (after a bulk change). */
  repaint(): void;
  refresh(): void;
  exportNow(): Promise<void>;
  destroy(): void;
}

const STYLE_RULES = `
[${OVERLAY_ATTR}].bc-box {
  position: absolute; z-index: 2147483600; cursor: pointer;
  border: 1px solid rgba(90, 90, 90, 0.55); border-radius: 2px;
  background: rgba(160, 160, 160, 0.12);
}
[${OVERLAY_ATTR}].bc-box[data-state="relevant"] {
  border-color: rgba(16, 122, 16, 0.9); background: rgba(40, 170, 40, 0.18);
}
[${OVERLAY_ATTR}].bc-box[data-state="noise"] {
  border-color: rgba(150, 30, 30, 0.9); background: rgba(200, 60, 60, 0.18);
}
[${OVERLAY_ATTR}].bc-box.bc-hover { outline: 2px solid rgba(30, 90, 200, 0.9); }
[${OVERLAY_ATTR}].bc-bar {
  position: fixed; right: 12px; bottom: 12px; z-index: 2147483601;
  font: 13px/1.5 system-ui, sans-serif; color: #222;
  background: #f6f6f4; border: 1px solid #bbb; border-radius: 6px;
  padding: 8px 12px; box-shadow: 0 2px 8px rgba(0, 0, 0, 0.25);
}
[${OVERLAY_ATTR}].bc-bar button { margin-left: 10px; }
[${OVERLAY_ATTR}].bc-bar .bc-message { margin-left: 10px; }
[${OVERLAY_ATTR}].bc-bar .bc-message.bc-warn { color: #a33c00; }
[${OVERLAY_ATTR}].bc-bar .bc-message.bc-error { color: #b00020; }
`;

function stateName(state: BlockState): string {
  if (state === 1) {
    return 'relevant';
  }
  if (state === 0) {
    return 'noise';
  }
  return 'untagged';
}

function isEditable(target: EventTarget | null): boolean {
  if (!(target instanceof Element)) {
    return false;
  }
  const tag = target.tagName.toLowerCase();
  return tag === 'input' || tag === 'textarea' || tag === 'select';
}

/** Build the overlay for an enumerated page and wire up its interactions. */
export function mountOverlay(
  doc: Document,
  session: TagSession,
  entries: BlockEntry[],
  hooks: OverlayHooks,
): OverlayHandles {
  const owned: Element[] = [];
  const mark = <T extends HTMLElement>(el: T, className: string): T => {
    el.setAttribute(OVERLAY_ATTR, '');
    el.className = className;
    owned.push(el);
    return el;
  };

  const style = mark(doc.createElement('style'), '');
  style.textContent = STYLE_RULES;
  doc.head.appendChild(style);

  const root = mark(doc.createElement('div'), 'bc-root');
  doc.body.appendChild(root);

  const boxes = new Map<string, HTMLElement>();
  let hoveredPath: string | null = null;

  const bar = mark(doc.createElement('div'), 'bc-bar');
  const progressEl = mark(doc.createElement('span'), 'bc-progress');
  const exportBtn = mark(doc.createElement('button'), 'bc-export');
  exportBtn.type = 'button';
  exportBtn.textContent = 'export';
  const messageEl = mark(doc.createElement('span'), 'bc-message');
  bar.append(progressEl, exportBtn, messageEl);
  doc.body.appendChild(bar);

  const paintProgress = (): void => {
    const { tagged, total } = session.progress();
    progressEl.textContent =
      total === 0 ? 'no text blocks on this page' : `${tagged}/${total} tagged`;
  };

  const message = (text: string, kind: '' | 'warn' | 'error' = ''): void => {
    messageEl.textContent = text;
    messageEl.className = kind === '' ? 'bc-message' : `bc-message bc-${kind}`;
  };

  const paintBox = (path: string): void => {
    const box = boxes.get(path);
    if (box) {
      box.setAttribute('data-state', stateName(session.stateOf(path)));
    }
  };

  const place = (box: HTMLElement, node: Text): void => {
    const range = doc.createRange();
    range.selectNodeContents(node);
    if (typeof range.getBoundingClientRect !== 'function') {
      return; // no layout in this DOM implementation; leave the box unplaced
    }
    const rect = range.getBoundingClientRect();
    const view = doc.defaultView;
    const left = rect.left + (view ? view.scrollX : 0);
    const top = rect.top + (view ? view.scrollY : 0);
    box.style.left = `${left}px`;
    box.style.top = `${top}px`;
    box.style.width = `${rect.width}px`;
    box.style.height = `${rect.height}px`;
  };

  for (const entry of entries) {
    const path = entry.block.dom_path;
    const box = mark(doc.createElement('div'), 'bc-box');
    box.setAttribute('data-path', path);
    box.setAttribute('data-state', 'untagged');
    box.title = entry.block.text;
    box.addEventListener('click', (event) => {
      event.preventDefault();
      session.cycle(path);
      paintBox(path);
      paintProgress();
    });
    box.addEventListener('mouseenter', () => {
      hoveredPath = path;
      box.classList.add('bc-hover');
    });
    box.addEventListener('mouseleave', () => {
      if (hoveredPath === path) {
        hoveredPath = null;
      }
      box.classList.remove('bc-hover');
    });
    boxes.set(path, box);
    root.appendChild(box);
  }

  const refresh = (): void => {
    for (const entry of entries) {
      const box = boxes.get(entry.block.dom_path);
      if (box) {
        place(box, entry.node);
      }
    }
  };

  const exportNow = async (): Promise<void> => {
    const untagged = session.untagged();
    if (untagged.length > 0) {
      const go = hooks.confirm(
        `${untagged.length} of ${session.blocks.length} blocks are untagged ` +
          'and will be omitted. Export anyway?',
      );
      if (!go) {
        message('export canceled', 'warn');
        return;
      }
    }
    const truth = session.toTruthPage();
    for (;;) {
      const result = await hooks.post(truth);
      if (result.ok) {
        message(
          untagged.length > 0
            ? `saved ${truth.blocks.length} labels (${untagged.length} untagged omitted)`
            : `saved ${truth.blocks.length} labels`,
          untagged.length > 0 ? 'warn' : '',
        );
        return;
      }
      if (result.network) {
        if (hooks.confirm('could not reach the server. Retry?')) {
          continue;
        }
        message('export failed: server unreachable', 'error');
        return;
      }
      message(`export rejected (${result.status}): ${result.error ?? ''}`, 'error');
      return;
    }
  };

  const onKeydown = (event: KeyboardEvent): void => {
    if (hoveredPath === null || isEditable(event.target)) {
      return;
    }
    const path = hoveredPath;
    if (event.key === 'r') {
      session.setState(path, 1);
    } else if (event.key === 'n') {
      session.setState(path, 0);
    } else if (event.key === 'u') {
      session.setState(path, 'untagged');
    } else {
      return;
    }
    paintBox(path);
    paintProgress();
  };
  doc.addEventListener('keydown', onKeydown);

  exportBtn.addEventListener('click', () => {
    void exportNow();
  });

  const view = doc.defaultView;
  if (view) {
    view.addEventListener('resize', refresh);
    view.addEventListener('scroll', refresh);
  }

  paintProgress();
  refresh();

  return {
    root,
    bar,
    boxes,
    hovered: () => hoveredPath,
    notify: message,
    repaint: () => {
      for (const path of boxes.keys()) {
        paintBox(path);
      }
      paintProgress();
    },
    refresh,
    exportNow,
    destroy: () => {
      doc.removeEventListener('keydown', onKeydown);
      if (view) {
        view.removeEventListener('resize', refresh);
        view.removeEventListener('scroll', refresh);
      }
      for (const el of owned) {
        el.remove();
      }
      boxes.clear();
    },
  };
}
