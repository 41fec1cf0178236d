/**
 * Ranking bar chart plus knock-out rule toggles.
 *
 * One horizontal bar per scored alternative (width proportional to its
 * total, three-decimal label), followed by a collapsed list of
 * screened-out alternatives with their elimination reasons. Unticking
 * a rule commits the reduced rule list; the service may reject the
 * change (e.g. when alternatives lack the metrics scoring would need),
 * in which case the banner shows the report and nothing changes.
 */

import { formatScore } from "../format";
import type { KnockoutDoc, RankingResponse } from "../types";

export interface RankingChartHandle {
  element: HTMLElement;
  render(ranking: RankingResponse, knockouts: KnockoutDoc[]): void;
}

export interface RankingChartOptions {
  onRulesChange: (rules: KnockoutDoc[]) => void;
}

function describeRule(rule: KnockoutDoc): string {
  const threshold = Array.isArray(rule.threshold)
    ? `{${rule.threshold.join(", ")}}`
    : String(rule.threshold);
  return `${rule.criterion} ${rule.predicate} ${threshold}`;
}

export function createRankingChart(options: RankingChartOptions): RankingChartHandle {
  const root = document.createElement("section");
  root.className = "ranking-chart";

  const title = document.createElement("h3");
  title.textContent = "Ranking";
  root.appendChild(title);

  const rules = document.createElement("div");
  rules.className = "knockout-toggles";
  root.appendChild(rules);

  const bars = document.createElement("div");
  bars.className = "bars";
  root.appendChild(bars);

  const eliminated = document.createElement("details");
  eliminated.className = "eliminated";
  root.appendChild(eliminated);

  return {
    element: root,
    render(ranking: RankingResponse, knockouts: KnockoutDoc[]): void {
      rules.replaceChildren();
      knockouts.forEach((rule, index) => {
        const label = document.createElement("label");
        label.className = "knockout-toggle";
        const box = document.createElement("input");
        box.type = "checkbox";
        box.checked = true;
        box.dataset.ruleIndex = String(index);
        box.addEventListener("change", () => {
          const kept = knockouts.filter((_, k) =>
            k === index ? box.checked : true);
          options.onRulesChange(kept);
        });
        label.appendChild(box);
        label.appendChild(document.createTextNode(describeRule(rule)));
        rules.appendChild(label);
      });

      bars.replaceChildren();
      for (const breakdown of ranking.breakdowns) {
        const row = document.createElement("div");
        row.className = "rank-row";
        row.dataset.alternative = breakdown.alternative_id;

        const rank = document.createElement("span");
        rank.className = "rank";
        rank.textContent = String(breakdown.rank);
        const name = document.createElement("span");
        name.className = "alternative";
        name.textContent = breakdown.alternative_id;
        const bar = document.createElement("span");
        bar.className = "bar";
        bar.style.width = `${Math.round(breakdown.total * 100)}%`;
        const total = document.createElement("span");
        total.className = "total";
        total.textContent = formatScore(breakdown.total);

        row.appendChild(rank);
        row.appendChild(name);
        row.appendChild(bar);
        row.appendChild(total);
        bars.appendChild(row);
      }

      eliminated.replaceChildren();
      const summary = document.createElement("summary");
      summary.textContent = `${ranking.eliminated.length} screened out`;
      eliminated.appendChild(summary);
      for (const dropped of ranking.eliminated) {
        const line = document.createElement("div");
        line.className = "eliminated-row";
        line.textContent = `${dropped.id}: ${dropped.reason}`;
        eliminated.appendChild(line);
      }
    },
  };
}
