import { ApiClient } from './api.js';
import { CounterfactualPanel } from './cfpanel.js';
import { InstanceEditor, defaultInstance } from './editor.js';
import { IcePanel } from './icepanel.js';
import { LatestGate } from './latest.js';
import type { InstanceMap, ModelInfo } from './types.js';

/**
 * The what-if explorer: edit an instance feature by feature, watch the
 * model's confidence respond, ask for counterfactual suggestions, and apply
 * one as the next instance.  All numbers on screen come from service
 * responses; the client does no model math of its own.
 */
export class App {
  model: ModelInfo | null = null;
  editor!: InstanceEditor;
  cfPanel!: CounterfactualPanel;
  icePanel!: IcePanel;
  private predictGate = new LatestGate();
  private banner!: HTMLElement;
  private prediction!: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    readonly api: ApiClient,
  ) {}

  async init(): Promise<void> {
    this.root.innerHTML = `
      <div id="banner" class="banner" hidden></div>
      <header><h1>confidence what-if explorer</h1></header>
      <main>
        <section id="editor-section">
          <h2>instance</h2>
          <div id="editor"></div>
          <div id="prediction" class="prediction"></div>
        </section>
        <section id="cf-section">
          <h2>counterfactual suggestions</h2>
          <div id="cf-panel"></div>
        </section>
        <section id="ice-section">
          <h2>confidence by feature value</h2>
          <div id="ice-panel"></div>
        </section>
      </main>
    `;
    this.banner = this.root.querySelector('#banner')!;
    this.prediction = this.root.querySelector('#prediction')!;

    let model: ModelInfo;
    try {
      model = await this.api.getModel();
    } catch {
      this.showBanner(`service unreachable at ${this.api.baseUrl}`);
      return;
    }
    this.model = model;

    this.editor = new InstanceEditor(
      this.root.querySelector('#editor')!,
      model.features,
      (instance) => this.onInstanceChanged(instance),
    );
    this.cfPanel = new CounterfactualPanel(
      this.root.querySelector('#cf-panel')!,
      this.api,
      () => ({ ...this.editor.instance }),
      (instance) => this.applySuggestion(instance),
    );
    this.icePanel = new IcePanel(
      this.root.querySelector('#ice-panel')!,
      this.api,
      model.features,
      () => ({ ...this.editor.instance }),
      (feature, value) => this.editor.setValue(feature, value),
    );

    this.editor.render(defaultInstance(model.features));
    this.cfPanel.render();
    this.icePanel.render();
    this.onInstanceChanged({ ...this.editor.instance });
    void this.icePanel.refresh();
  }

  /** Apply a suggestion as the next instance; its prediction feeds the next move. */
  applySuggestion(instance: InstanceMap): void {
    this.editor.setInstance(instance);
  }

  private onInstanceChanged(instance: InstanceMap): void {
    void this.refreshPrediction(instance);
    void this.icePanel?.refresh();
  }

  private async refreshPrediction(instance: InstanceMap): Promise<void> {
    const { token, signal } = this.predictGate.issue();
    try {
      const prediction = await this.api.predict(instance, signal);
      if (!this.predictGate.isCurrent(token)) return; // stale: drop
      this.hideBanner();
      this.prediction.innerHTML = '';
      const cls = document.createElement('div');
      cls.className = 'predicted-class';
      cls.textContent = `prediction: ${prediction.predicted_class}`;
      const conf = document.createElement('div');
      conf.className = 'confidence';
      conf.dataset.confidence = String(prediction.confidence);
      conf.dataset.probability = String(prediction.probability);
      conf.textContent = `confidence: ${(prediction.confidence * 100).toFixed(1)}%`;
      this.prediction.appendChild(cls);
      this.prediction.appendChild(conf);
    } catch (error) {
      if ((error as Error).name === 'AbortError') return;
      if (!this.predictGate.isCurrent(token)) return;
      this.showBanner(`service unreachable at ${this.api.baseUrl}`);
    }
  }

  private showBanner(message: string): void {
    this.banner.textContent = message;
    this.banner.hidden = false;
    this.editor?.setEnabled(false);
  }

  private hideBanner(): void {
    if (!this.banner.hidden) {
      this.banner.hidden = true;
      this.editor?.setEnabled(true);
    }
  }
}

export function serviceBaseUrl(search: string): string {
  return new URLSearchParams(search).get('api') ?? 'http://127.0.0.1:8080';
}

// browser bootstrap; tests construct App themselves
const mount = typeof document !== 'undefined' ? document.getElementById('app') : null;
if (mount && !('vitest' in globalThis)) {
  const app = new App(mount, new ApiClient(serviceBaseUrl(window.location.search)));
  void app.init();
}
