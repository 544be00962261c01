import { describe, expect, it } from 'vitest';

import { collectBlocks } from '../src/blocks.js';
import { truthJson } from '../src/export.js';
import { TagSession } from '../src/session.js';
import { loadFixtures, parseHtml } from './helpers.js';

const fixtures = loadFixtures();

// The export round trip: a scripted session that tags every block with the
// bundled corpus labels must produce, byte for byte, the canonical truth
// file whose evaluator comparison against a real prediction run (embedded
// in the fixture at generation time) has zero unmatched entries.
describe('scripted tagging session round trip', () => {
  for (const fixture of fixtures) {
    it(`${fixture.page_id}: export equals the canonical truth file`, () => {
      const entries = collectBlocks(parseHtml(fixture.served_html));
      const session = new TagSession(
        fixture.page_id,
        entries.map((e) => e.block),
      );

      for (const [path, label] of Object.entries(fixture.truth_labels)) {
        // reach each label through the click cycle, as a user would
        session.cycle(path); // relevant
        if (label === 0) {
          session.cycle(path); // noise
        }
      }
      expect(session.progress()).toEqual({
        tagged: Object.keys(fixture.truth_labels).length,
        total: entries.length,
      });

      expect(truthJson(session.toTruthPage())).toBe(fixture.expected_truth_json);
    });

    it(`${fixture.page_id}: evaluator matched it with zero unmatched entries`, () => {
      expect(fixture.evaluator.unmatched_pred).toBe(0);
      expect(fixture.evaluator.unmatched_truth).toBe(0);
      expect(fixture.evaluator.matched).toBeGreaterThan(0);
    });
  }
});
