import init, { densityCurves, normalizationConstants, pairedTest } from "./pkg/ratiokit_web.js";

const field = (section, name) => section.querySelector(`[name=${name}]`).value.trim();
const num = (section, name) => Number(field(section, name)) >>> 0;

function fail(section, err) {
  section.querySelector(".out").innerHTML = `<p class="err">${String(err)}</p>`;
}

function frame(ctx, xMax, yMax, xTicks) {
  const { width: w, height: h } = ctx.canvas;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(40, 10, w - 50, h - 40);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  for (const t of xTicks) ctx.fillText(String(t), 40 + (t / xMax) * (w - 50) - 6, h - 14);
  ctx.fillText(yMax.toPrecision(2), 4, 16);
  return {
    x: (v) => 40 + (v / xMax) * (w - 50),
    y: (v) => 10 + (1 - v / yMax) * (h - 40),
  };
}

function drawCurves(section) {
  const data = JSON.parse(densityCurves(
    field(section, "null"), field(section, "transform"), 512, num(section, "samples"), 50, num(section, "seed")));
  const ctx = section.querySelector("canvas").getContext("2d");
  const a = data.analytic, h = data.histogram;
  const finite = a.density.filter(Number.isFinite);
  const yMax = 1.1 * Math.max(...finite, ...h.density);
  const s = frame(ctx, 1, yMax, [0, 0.25, 0.5, 0.75, 1]);

  ctx.fillStyle = "rgba(70,130,180,.35)";
  h.x.forEach((x, k) => {
    const top = s.y(h.density[k]);
    ctx.fillRect(s.x(x - data.bin_width / 2), top, s.x(data.bin_width) - s.x(0), s.y(0) - top);
  });
  ctx.strokeStyle = "#c33";
  ctx.lineWidth = 2;
  ctx.beginPath();
  a.x.forEach((x, k) => (k ? ctx.lineTo : ctx.moveTo).call(ctx, s.x(x), s.y(Math.min(a.density[k], yMax))));
  ctx.stroke();

  section.querySelector(".out").textContent =
    `${data.model}, ${data.transform}: analytic mass on grid ${a.mass_in_grid.toFixed(5)}, histogram mass ${h.mass_in_grid.toFixed(5)}`;
}

function drawConstants(section) {
  const data = JSON.parse(normalizationConstants(
    field(section, "null"), field(section, "transform"), field(section, "layout"),
    num(section, "samples"), num(section, "seed")));
  const rows = data.layouts.flatMap((l) => l.bins.map((b) => {
    const z = b.std_error > 0 ? (b.monte_carlo - b.analytic) / b.std_error : 0;
    return `<tr><td>${l.label}</td><td>[${b.lo.toFixed(4)}, ${b.hi.toFixed(4)}]</td><td>${b.role}</td>` +
      `<td>${b.width.toFixed(6)}</td><td>${b.analytic.toFixed(6)}</td><td>${b.monte_carlo.toFixed(6)}</td>` +
      `<td>${b.std_error.toExponential(2)}</td><td>${z.toFixed(2)}</td></tr>`;
  }));
  section.querySelector(".out").innerHTML =
    `<p>${data.model}, ${data.transform}</p><table><tr><th>layout</th><th>bin</th><th>role</th><th>width</th>` +
    `<th>analytic mass</th><th>MC mass</th><th>SE</th><th>z</th></tr>${rows.join("")}</table>`;
}

function drawPaired(section) {
  const data = JSON.parse(pairedTest(
    field(section, "data"), field(section, "assumed"), field(section, "transform"), field(section, "normalizer"),
    num(section, "n"), num(section, "len"), num(section, "seed")));
  const ctx = section.querySelector("canvas").getContext("2d");
  const max = 1.1 * Math.max(...data.pairs.flat());
  const s = frame(ctx, max, max, [0, +(max / 2).toPrecision(2)]);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(s.x(0), s.y(0));
  ctx.lineTo(s.x(max), s.y(max));
  ctx.stroke();
  ctx.fillStyle = "rgba(200,60,60,.6)";
  for (const [on, off] of data.pairs) ctx.fillRect(s.x(off) - 2, s.y(on) - 2, 4, 4);

  const r = data.report;
  section.querySelector(".out").innerHTML =
    `<p>off (x) against on (y), one dot per sequence. Wilcoxon T = ${r.statistic}, ` +
    `n = ${r.n_effective}, log10 p = ${r.log10_p.toFixed(2)} (${r.method}).</p>`;
}

const actions = { curves: drawCurves, constants: drawConstants, paired: drawPaired };

await init();
for (const [id, run] of Object.entries(actions)) {
  const section = document.getElementById(id);
  const go = () => {
    try {
      run(section);
    } catch (e) {
      fail(section, e);
    }
  };
  section.querySelector("button").addEventListener("click", go);
  go();
}
