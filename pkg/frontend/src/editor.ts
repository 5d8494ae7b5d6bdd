import type { EditValue, FeatureSpec } from './types.js';

export type EditCheck =
  | { ok: true; value: EditValue }
  | { ok: false; error: string };

/**
 * Validate one editor field against the feature schema before anything is
 * sent to the service; schema-invalid values never leave the browser.
 */
export function validateEdit(feature: FeatureSpec, raw: string): EditCheck {
  const text = raw.trim();
  if (text === '') {
    return { ok: false, error: 'value required' };
  }
  if (feature.kind === 'categorical') {
    const categories = feature.categories ?? [];
    if (categories.includes(text)) {
      return { ok: true, value: text };
    }
    return { ok: false, error: `must be one of: ${categories.join(', ')}` };
  }
  const value = Number(text);
  if (!Number.isFinite(value)) {
    return { ok: false, error: 'not a number' };
  }
  return { ok: true, value };
}

/** Collect the edits that differ from the current instance, validating each. */
export function collectEdits(
  features: FeatureSpec[],
  current: Record<string, number>,
  editorValues: Record<string, string>,
): { edits: Record<string, EditValue>; errors: Record<string, string> } {
  const edits: Record<string, EditValue> = {};
  const errors: Record<string, string> = {};
  for (const feature of features) {
    const raw = editorValues[feature.name];
    if (raw === undefined) continue;
    const check = validateEdit(feature, raw);
    if (!check.ok) {
      errors[feature.name] = check.error;
      continue;
    }
    const encoded =
      feature.kind === 'categorical'
        ? (feature.categories ?? []).indexOf(String(check.value))
        : (check.value as number);
    if (encoded !== current[feature.name]) {
      edits[feature.name] = check.value;
    }
  }
  return { edits, errors };
}
