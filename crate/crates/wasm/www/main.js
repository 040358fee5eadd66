import init, { analyze, check, straddle_probe, example } from "./pkg/jensen3_wasm.js";

const $ = (id) => document.getElementById(id);

function fmt(x) {
  return x === null || x === undefined ? "n/a" : Number(x).toPrecision(6);
}

function drawAnalysis(data) {
  const canvas = $("an-plot");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const s = data.samples;
  const pad = 36;
  const half = (h - 3 * pad / 2) / 2;
  const panels = [
    { key: "f", top: pad / 2, label: "f", color: "#1f5fa8" },
    { key: "d2", top: pad + half, label: "f'' (one-sided)", color: "#b35c00" },
  ];
  const xmin = s[0].x, xmax = s[s.length - 1].x;
  const px = (x) => pad + ((x - xmin) / (xmax - xmin)) * (w - 2 * pad);
  const k1 = data.report.k1;
  for (const p of panels) {
    let ys = s.map((q) => q[p.key]);
    if (p.key === "d2" && k1.feasible) ys = ys.concat([k1.lo, k1.hi]);
    let ymin = Math.min(...ys), ymax = Math.max(...ys);
    if (ymax - ymin < 1e-9) { ymin -= 1; ymax += 1; }
    const py = (y) => p.top + half - ((y - ymin) / (ymax - ymin)) * half;
    ctx.strokeStyle = "#ddd";
    ctx.strokeRect(pad, p.top, w - 2 * pad, half);
    if (p.key === "d2" && k1.feasible) {
      ctx.fillStyle = "rgba(22,112,46,0.15)";
      ctx.fillRect(pad, py(k1.hi), w - 2 * pad, Math.max(1, py(k1.lo) - py(k1.hi)));
    }
    ctx.strokeStyle = p.color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    s.forEach((q, i) => (i ? ctx.lineTo(px(q.x), py(q[p.key])) : ctx.moveTo(px(q.x), py(q[p.key]))));
    ctx.stroke();
    ctx.fillStyle = "#333";
    ctx.fillText(`${p.label}  [${fmt(ymin)}, ${fmt(ymax)}]`, pad + 4, p.top + 12);
  }
  ctx.strokeStyle = "#888";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(px(data.report.point), pad / 2);
  ctx.lineTo(px(data.report.point), h - pad / 2);
  ctx.stroke();
  ctx.setLineDash([]);
}

function runAnalyze() {
  try {
    const out = JSON.parse(analyze($("an-fn").value, +$("an-c").value, +$("an-lo").value, +$("an-hi").value, +$("an-grid").value, 400));
    drawAnalysis(out);
    const r = out.report;
    const band = (a) => (a.feasible ? `[${fmt(a.lo)}, ${fmt(a.hi)}]` : "empty");
    $("an-summary").textContent =
      `class ${r.class}; admissible A for 3-convexity ${band(r.k1)}, for 3-concavity ${band(r.k2)}; witness A = ${fmt(r.witness_a)}. ` +
      "The shaded band marks the 3-convexity interval.";
  } catch (e) {
    $("an-summary").textContent = `error: ${e.message ?? e}`;
  }
}

function loadExample() {
  $("ck-text").value = example($("ck-example").value) ?? "";
  runCheck();
}

function runCheck() {
  const verdict = $("ck-verdict");
  try {
    const text = check($("ck-text").value);
    const r = JSON.parse(text);
    verdict.className = r.verdict;
    verdict.textContent = `${r.verdict} (margin ${fmt(r.margin)})`;
    $("ck-report").textContent = text;
  } catch (e) {
    verdict.className = "";
    verdict.textContent = "input error";
    $("ck-report").textContent = String(e.message ?? e);
  }
}

function runProbe() {
  const s = +$("pr-s").value;
  $("pr-s-val").textContent = s.toFixed(2);
  try {
    const p = JSON.parse(straddle_probe($("pr-fn").value, s));
    const side = (name, q) => {
      const diffs = q.diffs ? `diffs (${fmt(q.diffs[0])}, ${fmt(q.diffs[1])})` : "";
      const unmet = q.unmet.length ? `unmet: ${q.unmet.join(", ")}` : "";
      return `${name.padEnd(18)} ${q.verdict.padEnd(17)} margin ${fmt(q.margin).padEnd(12)} ${diffs} ${unmet}`;
    };
    const h = p.scenario.pair2.h.map(fmt).join(", ");
    $("pr-out").textContent =
      `second pair h = (${h})\n` + side("literal", p.literal) + "\n" + side("region_restricted", p.region);
  } catch (e) {
    $("pr-out").textContent = `error: ${e.message ?? e}`;
  }
}

await init();
$("an-run").addEventListener("click", runAnalyze);
$("ck-load").addEventListener("click", loadExample);
$("ck-run").addEventListener("click", runCheck);
$("pr-s").addEventListener("input", runProbe);
$("pr-fn").addEventListener("change", runProbe);
runAnalyze();
loadExample();
runProbe();
