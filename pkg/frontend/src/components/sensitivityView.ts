/**
 * Weight-sweep visualization: a strip of segments colored by the
 * top-ranked alternative across the sweep range, flip points marked
 * where the leader changes, plus the stability interval readout.
 */

import type { SensitivityResponse } from "../types";

export interface SensitivityViewHandle {
  element: HTMLElement;
  render(result: SensitivityResponse): void;
}

export interface SensitivityViewOptions {
  criteria: string[];
  onRun: (criterion: string, grid: number) => void;
}

const PALETTE = ["#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2"];

export function createSensitivityView(options: SensitivityViewOptions): SensitivityViewHandle {
  const root = document.createElement("section");
  root.className = "sensitivity-view";

  const title = document.createElement("h3");
  title.textContent = "Ranking stability";
  root.appendChild(title);

  const controls = document.createElement("div");
  const picker = document.createElement("select");
  picker.className = "criterion-picker";
  for (const criterion of options.criteria) {
    const option = document.createElement("option");
    option.value = criterion;
    option.textContent = criterion;
    picker.appendChild(option);
  }
  const run = document.createElement("button");
  run.textContent = "Sweep";
  run.className = "run-sweep";
  run.addEventListener("click", () => options.onRun(picker.value, 101));
  controls.appendChild(picker);
  controls.appendChild(run);
  root.appendChild(controls);

  const strip = document.createElement("div");
  strip.className = "sweep-strip";
  root.appendChild(strip);

  const summary = document.createElement("div");
  summary.className = "sweep-summary";
  root.appendChild(summary);

  return {
    element: root,
    render(result: SensitivityResponse): void {
      strip.replaceChildren();
      const colors = new Map<string, string>();
      const colorFor = (id: string): string => {
        if (!colors.has(id)) {
          colors.set(id, PALETTE[colors.size % PALETTE.length]);
        }
        return colors.get(id)!;
      };

      for (const point of result.sweep) {
        const segment = document.createElement("span");
        segment.className = "sweep-segment";
        segment.dataset.top = point.ranking[0];
        segment.dataset.weight = point.weight.toFixed(4);
        segment.style.backgroundColor = colorFor(point.ranking[0]);
        segment.title = `w = ${point.weight.toFixed(3)}: ${point.ranking.join(" > ")}`;
        strip.appendChild(segment);
      }

      summary.replaceChildren();
      const interval = document.createElement("div");
      interval.className = "stability-interval";
      const bounds = result.stability_interval;
      interval.textContent =
        `top alternative stable for ${result.criterion} weight in ` +
        `[${bounds.lower.toFixed(3)}, ${bounds.upper.toFixed(3)}]` +
        (bounds.tie_at_baseline ? " (tie at baseline)" : "");
      summary.appendChild(interval);

      let previousTop: string | null = null;
      for (const point of result.sweep) {
        const top = point.ranking[0];
        if (previousTop !== null && top !== previousTop) {
          const marker = document.createElement("div");
          marker.className = "flip-marker";
          marker.textContent =
            `top changes ${previousTop} -> ${top} near w = ${point.weight.toFixed(3)}`;
          summary.appendChild(marker);
        }
        previousTop = top;
      }
    },
  };
}
