/**
 * What-if sliders for the top-level weights.
 *
 * Dragging previews only the dragged value; the commit happens on
 * release, sending the proportionally renormalized vector. All
 * displayed weights are overwritten from the service response after
 * each commit, keeping the service the single source of truth.
 */

import { formatWeight } from "../format";
import { proportionalTarget } from "../state";
import type { VectorPayload } from "../types";

export interface WeightPanelHandle {
  element: HTMLElement;
  setWeights(weights: VectorPayload): void;
}

export interface WeightPanelOptions {
  labels: string[];
  onCommit: (weights: VectorPayload) => void;
}

export function createWeightPanel(options: WeightPanelOptions): WeightPanelHandle {
  const root = document.createElement("section");
  root.className = "weight-panel";
  const title = document.createElement("h3");
  title.textContent = "Criterion weights";
  root.appendChild(title);

  let current: VectorPayload = {
    labels: [...options.labels],
    values: options.labels.map(() => 1 / options.labels.length),
  };
  const sliders = new Map<string, HTMLInputElement>();
  const readouts = new Map<string, HTMLElement>();

  for (const label of options.labels) {
    const row = document.createElement("div");
    row.className = "weight-row";
    row.dataset.criterion = label;

    const name = document.createElement("label");
    name.textContent = label;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "0.99";
    slider.step = "0.005";
    const readout = document.createElement("span");
    readout.className = "weight-value";

    slider.addEventListener("input", () => {
      readout.textContent = formatWeight(Number(slider.value));
    });
    slider.addEventListener("change", () => {
      options.onCommit(
        proportionalTarget(current, label, Number(slider.value)));
    });

    row.appendChild(name);
    row.appendChild(slider);
    row.appendChild(readout);
    root.appendChild(row);
    sliders.set(label, slider);
    readouts.set(label, readout);
  }

  return {
    element: root,
    setWeights(weights: VectorPayload): void {
      current = { labels: [...weights.labels], values: [...weights.values] };
      weights.labels.forEach((label, k) => {
        const slider = sliders.get(label);
        const readout = readouts.get(label);
        if (slider && readout) {
          slider.value = String(weights.values[k]);
          readout.textContent = formatWeight(weights.values[k]);
        }
      });
    },
  };
}
