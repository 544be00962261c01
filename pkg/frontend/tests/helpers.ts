// Shared fixture plumbing. Fixtures are generated from the bundled corpus
// by scripts/make_ui_fixtures.py in the repository root and committed, so
// the suite runs without a Python toolchain.

import fs from 'node:fs';
import path from 'node:path';

import { PageBlock } from '../src/blocks.js';
import { Label } from '../src/session.js';

export interface Fixture {
  page_id: string;
  served_html: string;
  blocks: PageBlock[];
  prediction_blocks: [string, string][];
  truth_labels: Record<string, Label>;
  expected_truth_json: string;
  options: Record<string, unknown>;
  evaluator: {
    matched: number;
    unmatched_pred: number;
    unmatched_truth: number;
    accuracy: number | null;
  };
}

// vitest runs rooted at the frontend directory
const FIXTURE_DIR = path.resolve(process.cwd(), 'tests', 'fixtures');

export function loadFixtures(): Fixture[] {
  const names = fs
    .readdirSync(FIXTURE_DIR)
    .filter((name) => name.endsWith('.json'))
    .sort();
  if (names.length === 0) {
    throw new Error(`no fixtures in ${FIXTURE_DIR}; run scripts/make_ui_fixtures.py`);
  }
  return names.map(
    (name) =>
      JSON.parse(fs.readFileSync(path.join(FIXTURE_DIR, name), 'utf-8')) as Fixture,
  );
}

export function parseHtml(html: string): Document {
  return new DOMParser().parseFromString(html, 'text/html');
}
