import init, { simulateFit, classify, demoPrices, matrix } from "./pkg/extremaldep_wasm_demo.js";

const $ = (id) => document.getElementById(id);
const CLASS_NAMES = ["independence", "weak", "strong", "full"];
const CLASS_COLORS = ["#bbbbbb", "#808080", "#f2c40f", "#1f4ec4"];

function params() {
  return {
    cls: $("class").value,
    alpha: Number($("alpha").value),
    n: Number($("n").value),
    p1: Number($("p1").value),
    p2: Number($("p2").value),
    seed: BigInt(Math.max(0, Math.floor(Number($("seed").value)))),
  };
}

function fail(target, err) {
  target.innerHTML = "";
  const p = document.createElement("p");
  p.className = "error";
  p.textContent = String(err.message ?? err);
  target.appendChild(p);
}

// Angle on the horizontal axis, log10 radius on the vertical one.
function drawPolar(fit) {
  const c = $("plot");
  const ctx = c.getContext("2d");
  const pad = 36;
  const w = c.width - 2 * pad;
  const h = c.height - 2 * pad;
  ctx.clearRect(0, 0, c.width, c.height);

  const pts = fit.points.map(([x, y]) => [x / (x + y), Math.log10(x + y)]).filter((p) => Number.isFinite(p[1]));
  const lo = Math.min(...pts.map((p) => p[1]));
  const hi = Math.max(...pts.map((p) => p[1]));
  const X = (t) => pad + t * w;
  const Y = (l) => pad + h - ((l - lo) / (hi - lo || 1)) * h;

  ctx.fillStyle = "rgba(242, 196, 15, 0.25)";
  ctx.fillRect(X(fit.cone.a), pad, Math.max(1, X(fit.cone.b) - X(fit.cone.a)), h);

  const cut = Math.log10(fit.threshold_radius);
  ctx.strokeStyle = "#c0392b";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(pad, Y(cut));
  ctx.lineTo(pad + w, Y(cut));
  ctx.stroke();
  ctx.setLineDash([]);

  for (const [t, l] of pts) {
    ctx.fillStyle = l >= cut ? "#1f4ec4" : "rgba(0, 0, 0, 0.25)";
    ctx.fillRect(X(t) - 1.5, Y(l) - 1.5, 3, 3);
  }

  ctx.strokeStyle = "#444";
  ctx.strokeRect(pad, pad, w, h);
  ctx.fillStyle = "#222";
  ctx.font = "11px sans-serif";
  for (const t of [0, 0.25, 0.5, 0.75, 1]) ctx.fillText(String(t), X(t) - 8, pad + h + 14);
  ctx.fillText("angle x / (x + y)", pad + w / 2 - 40, c.height - 4);
  ctx.fillText(`log10 radius ${lo.toFixed(1)} to ${hi.toFixed(1)}`, pad, pad - 8);
}

function runFit() {
  const p = params();
  try {
    const fit = JSON.parse(simulateFit(p.cls, p.alpha, p.n, p.p1, p.p2, p.seed));
    drawPolar(fit);
    $("fit-info").textContent =
      `k = ${fit.k} largest radii (blue, above the dashed line), alpha estimate ${fit.alpha_hat.toFixed(3)}, ` +
      `fitted cone [${fit.cone.a.toFixed(2)}, ${fit.cone.b.toFixed(2)}] (shaded).`;
  } catch (e) {
    fail($("fit-info"), e);
  }
}

function runClassify() {
  const p = params();
  const reps = Number($("reps").value);
  $("class-info").textContent = "running...";
  setTimeout(() => {
    try {
      const r = JSON.parse(classify(p.cls, p.alpha, p.n, p.p1, p.p2, p.seed, reps));
      const bars = $("bars");
      bars.innerHTML = "";
      if (!r.weights) {
        $("class-info").textContent = "unclassified: too many bootstrap repetitions failed";
        return;
      }
      $("class-info").textContent =
        `majority: ${r.majority}. k = ${r.k}, resample size m = ${r.m}, resample tail k(m) = ${r.k_m}, ` +
        `cone [${r.cone.a.toFixed(2)}, ${r.cone.b.toFixed(2)}].`;
      r.weights.forEach((wt, i) => {
        const row = document.createElement("div");
        const name = document.createElement("span");
        name.className = "name";
        name.textContent = CLASS_NAMES[i];
        const bar = document.createElement("span");
        bar.className = "bar";
        bar.style.width = `${Math.round(wt * 300)}px`;
        bar.style.background = CLASS_COLORS[i];
        const val = document.createElement("span");
        val.textContent = wt.toFixed(2);
        row.append(name, bar, val);
        bars.appendChild(row);
      });
    } catch (e) {
      fail($("class-info"), e);
    }
  }, 10);
}

function runMatrix() {
  const text = $("prices").value;
  const reps = Number($("mreps").value);
  $("matrix-info").textContent = "running...";
  setTimeout(() => {
    try {
      const r = JSON.parse(matrix(text, params().seed, reps));
      $("heatmap").innerHTML = r.svg;
      $("matrix-csv").textContent = r.csv;
      $("matrix-info").textContent = r.dropped_rows ? `${r.dropped_rows} rows with missing or non-positive prices dropped.` : "";
    } catch (e) {
      fail($("matrix-info"), e);
    }
  }, 10);
}

await init();
$("fit").addEventListener("click", runFit);
$("classify").addEventListener("click", runClassify);
$("run-matrix").addEventListener("click", runMatrix);
$("demo-prices").addEventListener("click", () => {
  $("prices").value = demoPrices(params().seed);
});
$("file").addEventListener("change", async (ev) => {
  const f = ev.target.files[0];
  if (f) $("prices").value = await f.text();
});
runFit();
