import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { InstanceEditor, defaultInstance } from '../src/editor.js';
import type { FeatureInfo, InstanceMap } from '../src/types.js';

const FEATURES: FeatureInfo[] = [
  {
    name: 'Marital Status',
    kind: 'categorical',
    mutable: true,
    levels: ['Divorced/Widowed', 'Married', 'Never Married'],
  },
  { name: 'Age', kind: 'continuous', mutable: false, min: 17, max: 90 },
];

function mount() {
  const root = document.createElement('div');
  document.body.appendChild(root);
  const edits: InstanceMap[] = [];
  const editor = new InstanceEditor(root, FEATURES, (instance) => edits.push(instance));
  editor.render(defaultInstance(FEATURES));
  return { root, editor, edits };
}

afterEach(() => {
  document.body.innerHTML = '';
});

describe('InstanceEditor', () => {
  it('renders one control per feature of the right type', () => {
    const { root } = mount();
    const select = root.querySelector('select[data-feature="Marital Status"]');
    expect(select).toBeTruthy();
    expect(select!.querySelectorAll('option')).toHaveLength(3);
    const number = root.querySelector('input[type="number"][data-feature="Age"]');
    const slider = root.querySelector('input[type="range"][data-feature="Age"]');
    expect(number).toBeTruthy();
    expect(slider).toBeTruthy();
    expect((slider as HTMLInputElement).min).toBe('17');
    expect((slider as HTMLInputElement).max).toBe('90');
  });

  it('starts from first levels and midpoints', () => {
    const { editor } = mount();
    expect(editor.instance['Marital Status']).toBe('Divorced/Widowed');
    expect(editor.instance['Age']).toBe(53.5);
  });

  it('emits an edit when a level is selected', () => {
    const { root, edits } = mount();
    const select = root.querySelector(
      'select[data-feature="Marital Status"]',
    ) as HTMLSelectElement;
    select.value = 'Married';
    select.dispatchEvent(new Event('change'));
    expect(edits).toHaveLength(1);
    expect(edits[0]['Marital Status']).toBe('Married');
  });

  it('sends exactly the schema max when the slider hits its end', () => {
    vi.useFakeTimers();
    try {
      const { root, edits } = mount();
      const slider = root.querySelector(
        'input[type="range"][data-feature="Age"]',
      ) as HTMLInputElement;
      slider.value = slider.max;
      slider.dispatchEvent(new Event('input'));
      vi.advanceTimersByTime(150);
      expect(edits).toHaveLength(1);
      expect(edits[0]['Age']).toBe(90);
    } finally {
      vi.useRealTimers();
    }
  });

  it('debounces slider drags into one edit', () => {
    vi.useFakeTimers();
    try {
      const { root, edits } = mount();
      const slider = root.querySelector(
        'input[type="range"][data-feature="Age"]',
      ) as HTMLInputElement;
      for (const v of ['30', '40', '50']) {
        slider.value = v;
        slider.dispatchEvent(new Event('input'));
        vi.advanceTimersByTime(50);
      }
      vi.advanceTimersByTime(150);
      expect(edits).toHaveLength(1);
      expect(edits[0]['Age']).toBe(50);
    } finally {
      vi.useRealTimers();
    }
  });

  it('rejects out-of-bounds numbers client-side', () => {
    const { root, edits } = mount();
    const number = root.querySelector(
      'input[type="number"][data-feature="Age"]',
    ) as HTMLInputElement;
    number.value = '300';
    number.dispatchEvent(new Event('change'));
    expect(edits).toHaveLength(0);
    expect(number.classList.contains('invalid')).toBe(true);
    number.value = '64';
    number.dispatchEvent(new Event('change'));
    expect(edits).toHaveLength(1);
    expect(number.classList.contains('invalid')).toBe(false);
  });

  it('applies a whole instance with a single edit event', () => {
    const { root, editor, edits } = mount();
    editor.setInstance({ 'Marital Status': 'Never Married', Age: 40 });
    expect(edits).toHaveLength(1);
    expect(editor.instance).toEqual({ 'Marital Status': 'Never Married', Age: 40 });
    const select = root.querySelector(
      'select[data-feature="Marital Status"]',
    ) as HTMLSelectElement;
    expect(select.value).toBe('Never Married');
  });

  it('disables every control when the service is down', () => {
    const { root, editor } = mount();
    editor.setEnabled(false);
    for (const el of root.querySelectorAll('input, select')) {
      expect((el as HTMLInputElement).disabled).toBe(true);
    }
  });
});
