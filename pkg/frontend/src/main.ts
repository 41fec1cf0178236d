/**
 * Application wiring: session picker, judgment grids, weight sliders,
 * ranking chart, and sensitivity view, all backed by one SessionStore.
 */

import { ApiClient } from "./api";
import { createPairwiseGrid, PairwiseGridHandle } from "./components/pairwiseGrid";
import { createRankingChart, RankingChartHandle } from "./components/rankingChart";
import { createSensitivityView, SensitivityViewHandle } from "./components/sensitivityView";
import { createWeightPanel, WeightPanelHandle } from "./components/weightPanel";
import { SessionStore } from "./state";
import type { UiState } from "./state";

interface Workspace {
  grids: Map<string, PairwiseGridHandle>;
  weightPanel: WeightPanelHandle;
  chart: RankingChartHandle;
  sensitivity: SensitivityViewHandle;
}

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "");
const store = new SessionStore(api);

const app = document.getElementById("app")!;
const banner = document.createElement("div");
banner.className = "banner";
app.appendChild(banner);

const picker = document.createElement("div");
picker.className = "session-picker";
const sessionInput = document.createElement("input");
sessionInput.placeholder = "session id";
const loadButton = document.createElement("button");
loadButton.textContent = "Load session";
loadButton.addEventListener("click", () => {
  void store.load(sessionInput.value.trim()).catch(showError);
});
picker.appendChild(sessionInput);
picker.appendChild(loadButton);
app.appendChild(picker);

const workspaceRoot = document.createElement("div");
workspaceRoot.className = "workspace";
app.appendChild(workspaceRoot);

let workspace: Workspace | null = null;

function showError(error: unknown): void {
  banner.textContent = String(error);
  banner.className = "banner error";
}

function buildWorkspace(state: UiState): Workspace {
  workspaceRoot.replaceChildren();
  const grids = new Map<string, PairwiseGridHandle>();

  const objective = document.createElement("p");
  objective.className = "objective";
  objective.textContent = state.document.objective;
  workspaceRoot.appendChild(objective);

  const judgments = state.document.judgments ?? {};
  for (const [criterion, group] of Object.entries(judgments)) {
    const heading = document.createElement("h2");
    heading.textContent = `Pairwise judgments for ${criterion}`;
    workspaceRoot.appendChild(heading);
    for (const judgment of group) {
      const grid = createPairwiseGrid({
        stakeholder: judgment.stakeholder,
        labels: judgment.labels,
        onCommit: (matrix) => {
          void store.commitJudgments(
            judgment.stakeholder, judgment.labels, matrix, criterion);
        },
      });
      grid.setMatrix(judgment.entries);
      grids.set(judgment.stakeholder, grid);
      workspaceRoot.appendChild(grid.element);
    }
  }

  const weightPanel = createWeightPanel({
    labels: state.derived.top_level_weights.labels,
    onCommit: (weights) => void store.commitTopLevelWeights(weights),
  });
  weightPanel.setWeights(state.derived.top_level_weights);
  workspaceRoot.appendChild(weightPanel.element);

  const chart = createRankingChart({
    onRulesChange: (rules) => void store.commitKnockouts(rules),
  });
  chart.render(state.ranking, state.document.knockouts ?? []);
  workspaceRoot.appendChild(chart.element);

  const sensitivity = createSensitivityView({
    criteria: state.derived.top_level_weights.labels,
    onRun: (criterion, grid) => void store.runSensitivity(criterion, grid),
  });
  workspaceRoot.appendChild(sensitivity.element);

  return { grids, weightPanel, chart, sensitivity };
}

function refresh(state: UiState): void {
  if (!workspace) {
    return;
  }
  workspace.chart.render(state.ranking, state.document.knockouts ?? []);
  workspace.weightPanel.setWeights(state.derived.top_level_weights);
  for (const group of Object.values(state.derived.stakeholders)) {
    for (const entry of group) {
      workspace.grids.get(entry.stakeholder)?.setResult(entry.weights, entry.consistency);
    }
  }
}

store.subscribe((state, event) => {
  switch (event.kind) {
    case "loaded":
      workspace = buildWorkspace(state);
      banner.textContent = state.derived.warnings.join("; ");
      banner.className = "banner";
      break;
    case "conflict":
      banner.textContent = `Session changed elsewhere; reloaded. ${event.message ?? ""}`;
      banner.className = "banner warning";
      break;
    case "rejected":
      banner.textContent = `Change rejected: ${event.message ?? ""}`;
      banner.className = "banner error";
      break;
    case "mutated":
      refresh(state);
      banner.textContent = state.derived.warnings.join("; ");
      banner.className = "banner";
      break;
    case "sensitivity":
      if (state.sensitivity && workspace) {
        workspace.sensitivity.render(state.sensitivity);
      }
      break;
  }
});

const preset = params.get("session");
if (preset) {
  sessionInput.value = preset;
  void store.load(preset).catch(showError);
}
