// Least-squares exponential decay fit y ~ A exp(-rate * t), done in log space
// over the strictly positive samples.

export interface RateFit {
  rate: number;
  amplitude: number;
  pointsUsed: number;
}

export function fitExponentialRate(t: Float64Array, y: Float64Array): RateFit {
  const ts: number[] = [];
  const ls: number[] = [];
  for (let i = 0; i < t.length; i++) {
    if (y[i] > 0 && Number.isFinite(y[i])) {
      ts.push(t[i]);
      ls.push(Math.log(y[i]));
    }
  }
  if (ts.length < 2) throw new Error("rate fit needs at least two positive samples");
  const n = ts.length;
  let st = 0, sl = 0, stt = 0, stl = 0;
  for (let i = 0; i < n; i++) {
    st += ts[i];
    sl += ls[i];
    stt += ts[i] * ts[i];
    stl += ts[i] * ls[i];
  }
  const denom = n * stt - st * st;
  if (denom === 0) throw new Error("rate fit is degenerate: all samples at one time");
  const slope = (n * stl - st * sl) / denom;
  const intercept = (sl - slope * st) / n;
  return { rate: -slope, amplitude: Math.exp(intercept), pointsUsed: n };
}
