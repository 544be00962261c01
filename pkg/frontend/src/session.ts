// Tagging state for one page. Labels follow the pipeline convention:
// 1 = relevant (content), 0 = noise (boilerplate).

import { PageBlock } from './blocks.js';

export type Label = 0 | 1;
export type BlockState = Label | 'untagged';

export interface TruthBlock {
  dom_path: string;
  text_hash: string;
  label: Label;
}

export interface TruthPage {
  page_id: string;
  blocks: TruthBlock[];
}

export interface Progress {
  tagged: number;
  total: number;
}

// Click cycle: untagged -> relevant -> noise -> untagged.
const NEXT_STATE = new Map<BlockState, BlockState>([
  ['untagged', 1],
  [1, 0],
  [0, 'untagged'],
]);

export class TagSession {
  readonly pageId: string;
  readonly blocks: PageBlock[];
  private states: Map<string, BlockState>;

  constructor(pageId: string, blocks: PageBlock[]) {
    this.pageId = pageId;
    this.blocks = blocks;
    this.states = new Map(blocks.map((b) => [b.dom_path, 'untagged']));
  }

  stateOf(domPath: string): BlockState {
    const state = this.states.get(domPath);
    if (state === undefined) {
      throw new Error(`unknown block: ${domPath}`);
    }
    return state;
  }

  setState(domPath: string, state: BlockState): void {
    if (!this.states.has(domPath)) {
      throw new Error(`unknown block: ${domPath}`);
    }
    this.states.set(domPath, state);
  }

  /** Advance one step in the click cycle and return the new state. */
  cycle(domPath: string): BlockState {
    const next = NEXT_STATE.get(this.stateOf(domPath)) as BlockState;
    this.states.set(domPath, next);
    return next;
  }

  progress(): Progress {
    let tagged = 0;
    for (const state of this.states.values()) {
      if (state !== 'untagged') {
        tagged += 1;
      }
    }
    return { tagged, total: this.states.size };
  }

  /** dom_paths still untagged, in document order. */
  untagged(): string[] {
    return this.blocks
      .filter((b) => this.stateOf(b.dom_path) === 'untagged')
      .map((b) => b.dom_path);
  }

  /**
   * The exportable ground truth: tagged blocks only, sorted by dom_path
   * (the stored-file order, so export and server round-trip byte-equal).
   */
  toTruthPage(): TruthPage {
    const blocks: TruthBlock[] = [];
    for (const b of this.blocks) {
      const state = this.stateOf(b.dom_path);
      if (state === 'untagged') {
        continue;
      }
      blocks.push({ dom_path: b.dom_path, text_hash: b.text_hash, label: state });
    }
    blocks.sort((a, b) => (a.dom_path < b.dom_path ? -1 : a.dom_path > b.dom_path ? 1 : 0));
    return { page_id: this.pageId, blocks };
  }
}
