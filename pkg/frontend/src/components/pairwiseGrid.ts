/**
 * Pairwise judgment grid for one stakeholder.
 *
 * Upper-triangle cells are ratio selectors (9 .. 1 .. 1/9); the lower
 * triangle mirrors them as reciprocals automatically. Committing sends
 * the full matrix to the service; the returned weights and consistency
 * ratio are rendered next to the grid, the gauge turning red when the
 * ratio exceeds the 0.10 acceptability bound.
 */

import { formatRatio, formatWeight, ratioOptions } from "../format";
import type { ConsistencyPayload, VectorPayload } from "../types";

export interface PairwiseGridHandle {
  element: HTMLElement;
  /** Current full matrix as selected in the grid. */
  matrix(): number[][];
  /** Preload selections (e.g. from stored judgments). */
  setMatrix(entries: number[][]): void;
  /** Render service-confirmed weights and consistency. */
  setResult(weights: VectorPayload, consistency: ConsistencyPayload): void;
}

export interface PairwiseGridOptions {
  stakeholder: string;
  labels: string[];
  onCommit: (matrix: number[][]) => void;
}

const CR_BOUND = 0.1;

export function createPairwiseGrid(options: PairwiseGridOptions): PairwiseGridHandle {
  const { labels, stakeholder } = options;
  const n = labels.length;
  const root = document.createElement("section");
  root.className = "pairwise-grid";
  root.dataset.stakeholder = stakeholder;

  const title = document.createElement("h3");
  title.textContent = stakeholder;
  root.appendChild(title);

  const table = document.createElement("table");
  const header = document.createElement("tr");
  header.appendChild(document.createElement("th"));
  for (const label of labels) {
    const cell = document.createElement("th");
    cell.textContent = label;
    header.appendChild(cell);
  }
  table.appendChild(header);

  const selects = new Map<string, HTMLSelectElement>();
  const mirrors = new Map<string, HTMLTableCellElement>();

  for (let row = 0; row < n; row++) {
    const tr = document.createElement("tr");
    const rowHead = document.createElement("th");
    rowHead.textContent = labels[row];
    tr.appendChild(rowHead);
    for (let col = 0; col < n; col++) {
      const cell = document.createElement("td");
      cell.dataset.row = String(row);
      cell.dataset.col = String(col);
      if (row === col) {
        cell.textContent = "1";
        cell.className = "diagonal";
      } else if (row < col) {
        const select = document.createElement("select");
        for (const value of ratioOptions()) {
          const option = document.createElement("option");
          option.value = String(value);
          option.textContent = formatRatio(value);
          if (value === 1) {
            option.selected = true;
          }
          select.appendChild(option);
        }
        select.addEventListener("change", () => {
          const mirror = mirrors.get(`${col},${row}`);
          if (mirror) {
            mirror.textContent = formatRatio(1 / Number(select.value));
          }
        });
        selects.set(`${row},${col}`, select);
        cell.appendChild(select);
      } else {
        cell.className = "mirror";
        cell.textContent = "1";
        mirrors.set(`${row},${col}`, cell);
      }
      tr.appendChild(cell);
    }
    table.appendChild(tr);
  }
  root.appendChild(table);

  const commit = document.createElement("button");
  commit.textContent = "Commit judgments";
  commit.className = "commit";
  root.appendChild(commit);

  const result = document.createElement("div");
  result.className = "grid-result";
  const weightsOut = document.createElement("span");
  weightsOut.className = "weights";
  const gauge = document.createElement("span");
  gauge.className = "cr-gauge";
  result.appendChild(weightsOut);
  result.appendChild(gauge);
  root.appendChild(result);

  function matrix(): number[][] {
    const entries: number[][] = [];
    for (let row = 0; row < n; row++) {
      const line: number[] = [];
      for (let col = 0; col < n; col++) {
        if (row === col) {
          line.push(1);
        } else if (row < col) {
          line.push(Number(selects.get(`${row},${col}`)!.value));
        } else {
          line.push(1 / Number(selects.get(`${col},${row}`)!.value));
        }
      }
      entries.push(line);
    }
    return entries;
  }

  commit.addEventListener("click", () => options.onCommit(matrix()));

  return {
    element: root,
    matrix,
    setMatrix(entries: number[][]): void {
      for (let row = 0; row < n; row++) {
        for (let col = row + 1; col < n; col++) {
          const select = selects.get(`${row},${col}`)!;
          const target = entries[row][col];
          let best = 0;
          let gap = Number.POSITIVE_INFINITY;
          for (let k = 0; k < select.options.length; k++) {
            const distance = Math.abs(Number(select.options[k].value) - target);
            if (distance < gap) {
              gap = distance;
              best = k;
            }
          }
          select.selectedIndex = best;
          const mirror = mirrors.get(`${col},${row}`);
          if (mirror) {
            mirror.textContent = formatRatio(1 / Number(select.value));
          }
        }
      }
    },
    setResult(weights: VectorPayload, consistency: ConsistencyPayload): void {
      weightsOut.textContent = weights.labels
        .map((label, k) => `${label} ${formatWeight(weights.values[k])}`)
        .join("  ");
      gauge.textContent = `CR ${consistency.cr.toFixed(3)}`;
      gauge.classList.toggle("green", consistency.cr <= CR_BOUND);
      gauge.classList.toggle("red", consistency.cr > CR_BOUND);
    },
  };
}
