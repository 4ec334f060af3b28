import { debounce } from './latest.js';
import type { FeatureInfo, InstanceMap } from './types.js';

const SLIDER_DEBOUNCE_MS = 150;

/**
 * One form control per schema feature: a selector for categorical levels,
 * a bounded number input plus slider for continuous values.  Bounds are
 * validated client-side (mirroring the schema) before any edit is emitted.
 */
export class InstanceEditor {
  readonly instance: InstanceMap = {};
  private controls = new Map<string, HTMLElement>();

  constructor(
    private readonly root: HTMLElement,
    private readonly features: FeatureInfo[],
    private readonly onEdit: (instance: InstanceMap) => void,
  ) {}

  render(initial: InstanceMap): void {
    this.root.textContent = '';
    this.controls.clear();
    for (const feature of this.features) {
      this.instance[feature.name] = initial[feature.name];
      const row = document.createElement('div');
      row.className = 'editor-row';
      const label = document.createElement('label');
      label.textContent = feature.name;
      row.appendChild(label);
      const control =
        feature.kind === 'categorical'
          ? this.buildSelect(feature)
          : this.buildNumeric(feature);
      row.appendChild(control);
      this.controls.set(feature.name, control);
      this.root.appendChild(row);
    }
  }

  private buildSelect(feature: FeatureInfo): HTMLElement {
    const select = document.createElement('select');
    select.dataset.feature = feature.name;
    for (const level of feature.levels ?? []) {
      const option = document.createElement('option');
      option.value = level;
      option.textContent = level;
      select.appendChild(option);
    }
    select.value = String(this.instance[feature.name]);
    select.addEventListener('change', () => {
      this.commit(feature.name, select.value);
    });
    return select;
  }

  private buildNumeric(feature: FeatureInfo): HTMLElement {
    const wrap = document.createElement('span');
    wrap.className = 'numeric-control';
    const number = document.createElement('input');
    number.type = 'number';
    const slider = document.createElement('input');
    slider.type = 'range';
    for (const input of [number, slider]) {
      input.dataset.feature = feature.name;
      input.min = String(feature.min);
      input.max = String(feature.max);
      input.step = 'any';
      input.value = String(this.instance[feature.name]);
    }
    const commitSlider = debounce(() => {
      number.value = slider.value;
      this.commit(feature.name, Number(slider.value));
    }, SLIDER_DEBOUNCE_MS);
    slider.addEventListener('input', () => {
      number.value = slider.value;
      commitSlider();
    });
    number.addEventListener('change', () => {
      const value = Number(number.value);
      if (!this.inBounds(feature, value)) {
        number.classList.add('invalid');
        return;
      }
      number.classList.remove('invalid');
      slider.value = number.value;
      this.commit(feature.name, value);
    });
    wrap.appendChild(number);
    wrap.appendChild(slider);
    return wrap;
  }

  private inBounds(feature: FeatureInfo, value: number): boolean {
    return (
      Number.isFinite(value) &&
      value >= (feature.min ?? -Infinity) &&
      value <= (feature.max ?? Infinity)
    );
  }

  private commit(name: string, value: string | number): void {
    this.instance[name] = value;
    this.onEdit({ ...this.instance });
  }

  /** Programmatic edit (apply buttons, chart clicks); triggers onEdit. */
  setValue(name: string, value: string | number): void {
    const control = this.controls.get(name);
    if (control instanceof HTMLSelectElement) {
      control.value = String(value);
    } else if (control) {
      for (const input of control.querySelectorAll('input')) {
        input.value = String(value);
      }
    }
    this.commit(name, value);
  }

  /** Replace the whole instance (counterfactual apply); one onEdit. */
  setInstance(instance: InstanceMap): void {
    for (const [name, value] of Object.entries(instance)) {
      this.instance[name] = value;
      const control = this.controls.get(name);
      if (control instanceof HTMLSelectElement) {
        control.value = String(value);
      } else if (control) {
        for (const input of control.querySelectorAll('input')) {
          input.value = String(value);
        }
      }
    }
    this.onEdit({ ...this.instance });
  }

  setEnabled(enabled: boolean): void {
    for (const el of this.root.querySelectorAll('input, select')) {
      (el as HTMLInputElement | HTMLSelectElement).disabled = !enabled;
    }
  }
}

/** Midpoint / first-level starting instance for a fresh session. */
export function defaultInstance(features: FeatureInfo[]): InstanceMap {
  const instance: InstanceMap = {};
  for (const feature of features) {
    if (feature.kind === 'categorical') {
      instance[feature.name] = (feature.levels ?? [''])[0];
    } else {
      instance[feature.name] = ((feature.min ?? 0) + (feature.max ?? 0)) / 2;
    }
  }
  return instance;
}
