import caseDocument from './fixtures/case1_result.json';

import type { ResultDocument } from '../src/types.js';

/** Deep copy so individual tests can mutate the document freely. */
export function loadCase1Document(): ResultDocument {
  return structuredClone(caseDocument) as unknown as ResultDocument;
}
