import init, { cyclic_beta_explorer, marked_bounds, cor12_search } from "./pkg/arithdeg_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function call(errId, f) {
  const v = JSON.parse(f());
  $(errId).textContent = v.error ?? "";
  return v.error ? null : v;
}

function fillTable(table, cols, rows) {
  table.replaceChildren();
  const head = table.insertRow();
  for (const c of cols) head.appendChild(document.createElement("th")).textContent = c;
  for (const r of rows) {
    const tr = table.insertRow();
    for (const c of cols) tr.insertCell().textContent = r[c];
    if (r.exceeds === false || r.above_one === false) tr.className = "fail";
  }
}

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
}

function plotBeta(v) {
  const c = $("cb-plot"), ctx = c.getContext("2d"), pad = 30;
  axes(ctx, c.width, c.height, pad);
  const qs = v.rows.map((r) => r.q);
  const ys = v.rows.flatMap((r) => [r.exact_f64, r.numeric_f64, 1]);
  const [q0, q1] = [Math.min(...qs), Math.max(...qs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const X = (q) => pad + ((q - q0) / Math.max(q1 - q0, 1)) * (c.width - 2 * pad);
  const Y = (y) => c.height - pad - ((y - y0) / Math.max(y1 - y0, 1e-9)) * (c.height - 2 * pad);
  ctx.strokeStyle = "#ccc";
  ctx.beginPath(); ctx.moveTo(X(q0), Y(1)); ctx.lineTo(X(q1), Y(1)); ctx.stroke();
  for (const [key, color] of [["exact_f64", "#036"], ["numeric_f64", "#c60"]]) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    v.rows.forEach((r, i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, X(r.q), Y(r[key])));
    ctx.stroke();
  }
  ctx.fillStyle = "#000";
  ctx.fillText(`q = ${q0} .. ${q1}`, pad, c.height - 8);
  ctx.fillText(`beta in [${y0.toFixed(3)}, ${y1.toFixed(3)}]  exact (blue), truncated (orange)`, pad, 18);
}

function plotPoints(v, bound) {
  const c = $("cs-plot"), ctx = c.getContext("2d"), pad = 20;
  axes(ctx, c.width, c.height, pad);
  const s = (c.width - 2 * pad) / (2 * bound);
  const X = (x) => c.width / 2 + x * s;
  const Y = (y) => c.height / 2 - y * s;
  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(pad, Y(0)); ctx.lineTo(c.width - pad, Y(0));
  ctx.moveTo(X(0), pad); ctx.lineTo(X(0), c.height - pad);
  ctx.stroke();
  ctx.fillStyle = "#036";
  for (const [x, y] of v.plot) ctx.fillRect(X(x) - 2, Y(y) - 2, 4, 4);
}

function runBeta() {
  const v = call("cb-err", () => cyclic_beta_explorer(num("cb-n"), num("cb-q"), num("cb-cut")));
  if (!v) return;
  fillTable($("cb-table"), ["q", "exact", "numeric_f64", "f"], v.rows);
  plotBeta(v);
}

function runMarked() {
  const v = call("mb-err", () => marked_bounds(num("mb-n"), num("mb-ell")));
  if (!v) return;
  fillTable($("mb-table"), ["i", "bound", "target", "exceeds"], v.rows);
}

function runSearch() {
  const bound = num("cs-b");
  const v = call("cs-err", () => cor12_search($("cs-g").value, bound, $("cs-s").value));
  if (!v) return;
  const d = v.degeneracy;
  const lines = d.lines.map((l) => `${l.line} (${l.count})`).join(", ") || "none";
  $("cs-summary").textContent =
    `${v.count} points; least degree of a vanishing curve: ${d.minimal_degree ?? "none up to 3"}; ` +
    `lines: ${lines}; off lines: ${d.off_lines}`;
  plotPoints(v, bound);
}

await init();
$("cb-run").onclick = runBeta;
$("mb-run").onclick = runMarked;
$("cs-run").onclick = runSearch;
runBeta();
runMarked();
runSearch();
