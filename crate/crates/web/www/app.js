import init, { backed_out_alpha, smile_curves, triangle_curves, density_curves } from "./pkg/sabr_web.js";

const SLIDERS = [
  // id, label, min, max, step, initial (fig1 config)
  ["beta", "beta", 0.05, 1, 0.01, 0.4],
  ["rho", "rho", -0.95, 0.95, 0.01, -0.33],
  ["nu", "nu", 0, 1, 0.005, 0.25],
  ["atm", "ATM vol %", 1, 20, 0.05, 4.25],
  ["tau", "tau (years)", 0.1, 30, 0.1, 15],
  ["forward", "forward %", 1, 20, 0.01, 8.01],
];
const COLORS = ["#c0392b", "#2471a3"];

function buildControls(onChange) {
  const box = document.getElementById("controls");
  for (const [id, label, min, max, step, value] of SLIDERS) {
    const name = document.createElement("label");
    name.textContent = label;
    name.htmlFor = id;
    const input = Object.assign(document.createElement("input"), { type: "range", id, min, max, step, value });
    const out = document.createElement("output");
    out.id = id + "-out";
    out.textContent = value;
    input.addEventListener("input", () => { out.textContent = input.value; onChange(); });
    box.append(name, input, out);
  }
}

const val = (id) => parseFloat(document.getElementById(id).value);

/** Splits `[xs, hagan, berestycki]` into three arrays of equal length. */
function split(flat) {
  const n = flat.length / 3;
  return [flat.slice(0, n), flat.slice(n, 2 * n), flat.slice(2 * n)];
}

function plot(canvasId, xs, series, { logX = false, zeroLine = false } = {}) {
  const c = document.getElementById(canvasId);
  const g = c.getContext("2d");
  const pad = 40;
  g.clearRect(0, 0, c.width, c.height);
  const tx = logX ? Math.log : (x) => x;
  const finite = series.flat().filter(Number.isFinite);
  if (!finite.length) return;
  let lo = Math.min(...finite), hi = Math.max(...finite);
  if (zeroLine) { lo = Math.min(lo, 0); hi = Math.max(hi, 0); }
  if (hi === lo) { hi += 1; lo -= 1; }
  const x0 = tx(xs[0]), x1 = tx(xs[xs.length - 1]);
  const px = (x) => pad + (tx(x) - x0) / (x1 - x0) * (c.width - 2 * pad);
  const py = (y) => c.height - pad - (y - lo) / (hi - lo) * (c.height - 2 * pad);

  g.strokeStyle = "#999"; g.lineWidth = 1;
  g.strokeRect(pad, pad, c.width - 2 * pad, c.height - 2 * pad);
  if (zeroLine) {
    g.setLineDash([4, 4]);
    g.beginPath(); g.moveTo(pad, py(0)); g.lineTo(c.width - pad, py(0)); g.stroke();
    g.setLineDash([]);
  }
  g.fillStyle = "#444"; g.font = "11px sans-serif";
  g.fillText(hi.toPrecision(3), 2, pad + 4);
  g.fillText(lo.toPrecision(3), 2, c.height - pad);
  g.fillText(xs[0].toPrecision(3), pad, c.height - pad + 14);
  g.fillText(xs[xs.length - 1].toPrecision(3), c.width - pad - 24, c.height - pad + 14);

  series.forEach((ys, i) => {
    g.strokeStyle = COLORS[i]; g.lineWidth = 2;
    g.beginPath();
    let pen = false;
    xs.forEach((x, j) => {
      if (!Number.isFinite(ys[j])) { pen = false; return; }
      pen ? g.lineTo(px(x), py(ys[j])) : g.moveTo(px(x), py(ys[j]));
      pen = true;
    });
    g.stroke();
  });
}

function redraw() {
  const p = [val("beta"), val("rho"), val("nu"), val("forward"), val("atm"), val("tau")];
  const status = document.getElementById("status");
  try {
    const alpha = backed_out_alpha(...p);
    const s = p[3];
    const [ks, h, b] = split(smile_curves(...p, s / 10, 3 * s, 150));
    plot("smile", ks, [h, b]);
    const [peaks, th, tb] = split(triangle_curves(...p, 0.25, 6, 24));
    plot("triangle", peaks, [th, tb], { zeroLine: true });
    const [dk, dh, db] = split(density_curves(...p, s / 100, 2 * s, 150));
    plot("density", dk, [dh, db], { logX: true, zeroLine: true });
    const negH = th.filter((v) => v < 0).length, negB = tb.filter((v) => v < 0).length;
    status.style.color = "#333";
    status.textContent = `alpha = ${alpha.toFixed(5)}; negative T(K) peaks: original ${negH}, corrected ${negB}`;
  } catch (e) {
    status.style.color = "#a00";
    status.textContent = String(e);
  }
}

await init();
buildControls(redraw);
redraw();
