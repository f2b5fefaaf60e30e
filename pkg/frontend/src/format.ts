// All numeric/date formatting funnels through here, so "every number on
// screen is traceable to a response field" can be checked mechanically:
// tests format the recorded response with these helpers and compare.

export function fmtNumber(value: number, digits = 3): string {
  return value.toFixed(digits);
}

export function fmtPercent(value: number): string {
  return `${(value * 100).toFixed(1)}%`;
}

export function fmtCount(value: number): string {
  return String(value);
}

export function fmtSigned(value: number, digits = 3): string {
  const text = value.toFixed(digits);
  return value > 0 ? `+${text}` : text;
}

export function fmtDate(iso: string): string {
  return iso; // dates stay in the API's YYYY-MM-DD form
}

export function fmtMs(value: number): string {
  return `${value.toFixed(1)} ms`;
}
