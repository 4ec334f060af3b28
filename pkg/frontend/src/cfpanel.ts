import type { ApiClient } from './api.js';
import type { CfResult, Direction, InstanceMap } from './types.js';

/**
 * Requests counterfactual suggestions for the current instance and lets the
 * user apply one as the next instance.  Suggestions show the service's
 * rendered sentence plus a chip per changed feature; infeasible searches
 * show the service's reason code verbatim.
 */
export class CounterfactualPanel {
  private form!: HTMLFormElement;
  private results!: HTMLElement;
  private busy = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly getInstance: () => InstanceMap,
    private readonly onApply: (instance: InstanceMap) => void,
  ) {}

  render(): void {
    this.root.textContent = '';
    this.form = document.createElement('form');
    this.form.className = 'cf-form';
    this.form.innerHTML = `
      <label>direction
        <select name="direction">
          <option value="lower">lower</option>
          <option value="raise">raise</option>
        </select>
      </label>
      <label>threshold
        <input name="threshold" type="number" min="0" max="1" step="any" value="0.5">
      </label>
      <label>alternatives
        <input name="alternatives" type="number" min="1" max="10" step="1" value="2">
      </label>
      <button type="submit">suggest</button>
    `;
    this.form.addEventListener('submit', (event) => {
      event.preventDefault();
      void this.request();
    });
    this.results = document.createElement('div');
    this.results.className = 'cf-results';
    this.root.appendChild(this.form);
    this.root.appendChild(this.results);
  }

  async request(): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    const button = this.form.querySelector('button')!;
    button.disabled = true;
    try {
      const data = new FormData(this.form);
      const response = await this.api.counterfactuals({
        instance: this.getInstance(),
        direction: data.get('direction') as Direction,
        threshold: Number(data.get('threshold')),
        alternatives: Number(data.get('alternatives')),
      });
      this.results.textContent = '';
      if (response.reason !== null) {
        const note = document.createElement('p');
        note.className = 'reason';
        note.textContent = response.reason;
        this.results.appendChild(note);
      }
      response.results.forEach((result, index) => {
        this.results.appendChild(this.suggestion(result, index));
      });
    } catch (error) {
      this.results.textContent = '';
      const note = document.createElement('p');
      note.className = 'error';
      note.textContent = String(error);
      this.results.appendChild(note);
    } finally {
      this.busy = false;
      button.disabled = false;
    }
  }

  private suggestion(result: CfResult, index: number): HTMLElement {
    const card = document.createElement('div');
    card.className = 'suggestion';
    card.dataset.index = String(index);
    card.dataset.confidence = String(result.confidence);

    const sentence = document.createElement('p');
    sentence.className = 'sentence';
    sentence.textContent = result.sentence;
    card.appendChild(sentence);

    const chips = document.createElement('div');
    chips.className = 'chips';
    for (const change of result.changes) {
      const chip = document.createElement('span');
      chip.className = 'chip';
      chip.textContent = `${change.feature}: ${change.old} → ${change.new}`;
      chips.appendChild(chip);
    }
    card.appendChild(chips);

    const apply = document.createElement('button');
    apply.type = 'button';
    apply.className = 'apply';
    apply.textContent = 'apply';
    apply.addEventListener('click', () => this.onApply({ ...result.instance }));
    card.appendChild(apply);
    return card;
  }
}
