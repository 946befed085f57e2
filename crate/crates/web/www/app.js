import init, { compoundCurves, algebraSummary, mixingDecay, compoundGenerators } from "./pkg/lieplateau_web.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

// Log-scale y plot of several series sharing an x axis.
function plot(canvas, series, xlabel) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 50;
  ctx.clearRect(0, 0, W, H);
  const pts = series.flatMap((s) => s.points.filter((p) => p[1] > 0));
  if (pts.length === 0) return;
  const xs = pts.map((p) => p[0]), ys = pts.map((p) => Math.log10(p[1]));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.floor(Math.min(...ys)), Math.ceil(Math.max(...ys))];
  const sx = (x) => pad + ((x - x0) / Math.max(x1 - x0, 1e-9)) * (W - 2 * pad);
  const sy = (y) => H - pad - ((y - y0) / Math.max(y1 - y0, 1e-9)) * (H - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  const ystep = Math.max(1, Math.ceil((y1 - y0) / 8));
  for (let y = y0; y <= y1; y += ystep) {
    ctx.fillText(`1e${y}`, 4, sy(y) + 4);
  }
  ctx.fillText(`${x0}`, pad, H - pad + 16);
  ctx.fillText(`${x1}`, W - pad - 10, H - pad + 16);
  ctx.fillText(xlabel, W / 2, H - 10);

  series.forEach((s, i) => {
    ctx.strokeStyle = ctx.fillStyle = COLORS[i % COLORS.length];
    ctx.beginPath();
    let started = false;
    for (const [x, y] of s.points) {
      if (!(y > 0)) continue;
      const [px, py] = [sx(x), sy(Math.log10(y))];
      started ? ctx.lineTo(px, py) : ctx.moveTo(px, py);
      started = true;
      ctx.fillRect(px - 2, py - 2, 4, 4);
    }
    ctx.stroke();
  });
}

function guard(out, f) {
  try {
    out.classList.remove("err");
    f();
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e.message ?? e);
  }
}

function drawCurves() {
  const legend = $("curve-legend");
  guard(legend, () => {
    const rows = JSON.parse(compoundCurves(Number($("curve-n").value)));
    const series = [
      { name: "basis state, k = 1", key: "k1" },
      { name: "basis state, k = n/2", key: "k_half" },
      { name: "uniform superposition", key: "uniform" },
      { name: "projector bound", key: "projector_bound" },
    ].map((s) => ({ ...s, points: rows.map((r) => [r.n, r[s.key]]) }));
    plot($("curve-plot"), series, "n");
    legend.innerHTML = series.map((s, i) => `<span style="color:${COLORS[i]}">&#9632; ${s.name}</span>`).join("");
  });
}

function summarize() {
  const out = $("summary-out");
  guard(out, () => {
    const s = JSON.parse(algebraSummary($("gens").value, 1));
    const lines = [`qubits ${s.n_qubits}, generators ${s.generators}, dimension ${s.dim}${s.truncated ? " (truncated)" : ""}`];
    if (!s.truncated) {
      lines.push(`center dimension ${s.center_dim}`);
      s.ideals.forEach((id, i) => lines.push(`ideal ${i + 1}: dim ${id.dim}, killing/frobenius ${id.kappa.toFixed(6)}`));
    }
    out.textContent = lines.join("\n");
  });
}

function mix() {
  const out = $("mix-out");
  guard(out, () => {
    const r = JSON.parse(mixingDecay($("gens").value, Number($("mix-t").value), Number($("mix-steps").value)));
    plot($("mix-plot"), [{ points: r.decay.map((e, i) => [i + 1, e]) }], "L");
    const rate = r.fitted_rate == null ? "n/a" : r.fitted_rate.toFixed(4);
    out.textContent = `gap ${r.gap.toFixed(6)}, fitted rate ${rate}, invariant dimension ${r.invariant_dim}, stable Killing rank ${r.stable_killing_rank.toFixed(3)}`;
  });
}

await init();
$("curve-go").onclick = drawCurves;
$("summary-go").onclick = summarize;
$("mix-go").onclick = mix;
$("preset-go").onclick = () =>
  guard($("summary-out"), () => {
    $("gens").value = compoundGenerators(Number($("preset-n").value), $("preset-so").checked);
  });
drawCurves();
summarize();
