import type { ApiClient } from './api.js';
import { LatestGate } from './latest.js';
import type { FeatureInfo, GridConfig, IceCurveData, InstanceMap } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';
const WIDTH = 560;
const HEIGHT = 320;
const MARGIN = { left: 48, right: 16, top: 24, bottom: 40 };

/**
 * Confidence chart for one swept feature: bars for categorical levels, a
 * line for continuous grids.  Hovering a point shows (value, confidence);
 * clicking a point writes that value back into the instance editor.
 */
export class IcePanel {
  private select!: HTMLSelectElement;
  private gridInputs!: { min: HTMLInputElement; max: HTMLInputElement; step: HTMLInputElement };
  private chart!: HTMLElement;
  private gate = new LatestGate();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly features: FeatureInfo[],
    private readonly getInstance: () => InstanceMap,
    private readonly onPick: (feature: string, value: string | number) => void,
  ) {}

  render(): void {
    this.root.textContent = '';
    const bar = document.createElement('div');
    bar.className = 'ice-controls';
    this.select = document.createElement('select');
    this.select.className = 'ice-feature';
    for (const feature of this.features) {
      const option = document.createElement('option');
      option.value = feature.name;
      option.textContent = feature.name;
      this.select.appendChild(option);
    }
    this.select.addEventListener('change', () => {
      this.syncGridBounds();
      void this.refresh();
    });
    bar.appendChild(this.select);

    const grid = document.createElement('span');
    grid.className = 'ice-grid';
    this.gridInputs = {
      min: document.createElement('input'),
      max: document.createElement('input'),
      step: document.createElement('input'),
    };
    for (const [name, input] of Object.entries(this.gridInputs)) {
      input.type = 'number';
      input.step = 'any';
      input.placeholder = name;
      input.className = `grid-${name}`;
      input.addEventListener('change', () => void this.refresh());
      grid.appendChild(input);
    }
    bar.appendChild(grid);
    this.root.appendChild(bar);

    this.chart = document.createElement('div');
    this.chart.className = 'ice-chart';
    this.root.appendChild(this.chart);
    this.syncGridBounds();
  }

  get selectedFeature(): FeatureInfo {
    return this.features.find((f) => f.name === this.select.value) ?? this.features[0];
  }

  private syncGridBounds(): void {
    const feature = this.selectedFeature;
    const continuous = feature.kind === 'continuous';
    for (const input of Object.values(this.gridInputs)) {
      input.disabled = !continuous;
    }
    if (continuous) {
      this.gridInputs.min.value = String(feature.min);
      this.gridInputs.max.value = String(feature.max);
      this.gridInputs.step.value = String(((feature.max ?? 0) - (feature.min ?? 0)) / 100);
    } else {
      for (const input of Object.values(this.gridInputs)) input.value = '';
    }
  }

  gridConfig(): Record<string, GridConfig> | undefined {
    const feature = this.selectedFeature;
    if (feature.kind !== 'continuous') return undefined;
    return {
      [feature.name]: {
        min: Number(this.gridInputs.min.value),
        max: Number(this.gridInputs.max.value),
        step: Number(this.gridInputs.step.value),
      },
    };
  }

  async refresh(): Promise<void> {
    const feature = this.selectedFeature;
    const { token, signal } = this.gate.issue();
    try {
      const response = await this.api.ice(
        this.getInstance(),
        [feature.name],
        this.gridConfig(),
        signal,
      );
      if (!this.gate.isCurrent(token)) return; // superseded: drop
      this.draw(response.curves[0]);
    } catch (error) {
      if ((error as Error).name === 'AbortError') return;
      if (!this.gate.isCurrent(token)) return;
      this.chart.textContent = String(error);
    }
  }

  private draw(curve: IceCurveData): void {
    this.chart.textContent = '';
    const svg = document.createElementNS(SVG_NS, 'svg');
    svg.setAttribute('viewBox', `0 0 ${WIDTH} ${HEIGHT}`);
    svg.setAttribute('width', String(WIDTH));
    svg.setAttribute('height', String(HEIGHT));
    svg.dataset.points = String(curve.points.length);

    const plotW = WIDTH - MARGIN.left - MARGIN.right;
    const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
    const sy = (u: number) => MARGIN.top + (1 - u) * plotH;

    const title = document.createElementNS(SVG_NS, 'text');
    title.setAttribute('x', String(WIDTH / 2));
    title.setAttribute('y', '14');
    title.setAttribute('text-anchor', 'middle');
    title.classList.add('chart-title');
    title.textContent = `${curve.prediction_class} — ${curve.feature}`;
    svg.appendChild(title);

    for (const tick of [0, 0.25, 0.5, 0.75, 1]) {
      const line = document.createElementNS(SVG_NS, 'line');
      line.setAttribute('x1', String(MARGIN.left));
      line.setAttribute('x2', String(WIDTH - MARGIN.right));
      line.setAttribute('y1', String(sy(tick)));
      line.setAttribute('y2', String(sy(tick)));
      line.classList.add('gridline');
      svg.appendChild(line);
      const label = document.createElementNS(SVG_NS, 'text');
      label.setAttribute('x', String(MARGIN.left - 6));
      label.setAttribute('y', String(sy(tick) + 4));
      label.setAttribute('text-anchor', 'end');
      label.classList.add('tick');
      label.textContent = String(tick);
      svg.appendChild(label);
    }

    if (curve.kind === 'categorical') {
      const slot = plotW / curve.points.length;
      curve.points.forEach((point, index) => {
        const bar = document.createElementNS(SVG_NS, 'rect');
        const barWidth = slot * 0.6;
        bar.setAttribute('x', String(MARGIN.left + slot * (index + 0.5) - barWidth / 2));
        bar.setAttribute('y', String(sy(point.confidence)));
        bar.setAttribute('width', String(barWidth));
        bar.setAttribute('height', String(MARGIN.top + plotH - sy(point.confidence)));
        bar.classList.add('bar');
        if (index === curve.origin_index) bar.classList.add('origin');
        this.attachPoint(bar, curve.feature, point.value, point.confidence);
        svg.appendChild(bar);
        const label = document.createElementNS(SVG_NS, 'text');
        label.setAttribute('x', String(MARGIN.left + slot * (index + 0.5)));
        label.setAttribute('y', String(HEIGHT - MARGIN.bottom + 14));
        label.setAttribute('text-anchor', 'middle');
        label.classList.add('tick');
        label.textContent = String(point.value);
        svg.appendChild(label);
      });
    } else {
      const values = curve.points.map((p) => Number(p.value));
      const lo = values[0];
      const hi = values[values.length - 1];
      const span = hi > lo ? hi - lo : 1;
      const sx = (v: number) => MARGIN.left + ((v - lo) / span) * plotW;
      const polyline = document.createElementNS(SVG_NS, 'polyline');
      polyline.setAttribute(
        'points',
        curve.points.map((p) => `${sx(Number(p.value))},${sy(p.confidence)}`).join(' '),
      );
      polyline.classList.add('line');
      svg.appendChild(polyline);
      curve.points.forEach((point, index) => {
        const dot = document.createElementNS(SVG_NS, 'circle');
        dot.setAttribute('cx', String(sx(Number(point.value))));
        dot.setAttribute('cy', String(sy(point.confidence)));
        dot.setAttribute('r', index === curve.origin_index ? '5' : '3');
        dot.classList.add('dot');
        if (index === curve.origin_index) dot.classList.add('origin');
        this.attachPoint(dot, curve.feature, point.value, point.confidence);
        svg.appendChild(dot);
      });
    }
    this.chart.appendChild(svg);
  }

  private attachPoint(
    el: SVGElement,
    feature: string,
    value: string | number,
    confidence: number,
  ): void {
    el.dataset.value = String(value);
    el.dataset.confidence = String(confidence);
    const tooltip = document.createElementNS(SVG_NS, 'title');
    tooltip.textContent = `${value}: ${confidence.toFixed(3)}`;
    el.appendChild(tooltip);
    el.addEventListener('click', () => this.onPick(feature, value));
  }
}
