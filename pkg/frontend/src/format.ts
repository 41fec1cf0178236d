/** Display formatting helpers shared across components. */

/**
 * Render a ratio judgment the way practitioners write it: whole numbers
 * as-is, values below one as a reciprocal fraction ("1/3") when they
 * are close to one, otherwise with two decimals.
 */
export function formatRatio(value: number): string {
  if (!Number.isFinite(value) || value <= 0) {
    return String(value);
  }
  if (value >= 1) {
    return Number.isInteger(value) ? String(value) : trimmed(value);
  }
  const denominator = Math.round(1 / value);
  if (denominator >= 1 && Math.abs(1 / denominator - value) / value < 0.05) {
    return `1/${denominator}`;
  }
  return trimmed(value);
}

function trimmed(value: number): string {
  return value.toFixed(2).replace(/0+$/, "").replace(/\.$/, "");
}

/** Scores and totals are displayed with three decimals everywhere. */
export function formatScore(value: number): string {
  return value.toFixed(3);
}

export function formatWeight(value: number): string {
  return value.toFixed(2);
}

/** Saaty-style input options: 9 down to 2, 1, then reciprocals to 1/9. */
export function ratioOptions(): number[] {
  const options: number[] = [];
  for (let k = 9; k >= 2; k--) {
    options.push(k);
  }
  options.push(1);
  for (let k = 2; k <= 9; k++) {
    options.push(1 / k);
  }
  return options;
}
