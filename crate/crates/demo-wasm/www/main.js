import init, { sphere_errors, bound_curve, triangle_side, condition_bounds } from "./pkg/manifold_approx_demo.js";

const $ = (id) => document.getElementById(id);
const SIDE = 40;

function report(el, fn) {
  try {
    el.classList.remove("err");
    fn();
  } catch (e) {
    el.classList.add("err");
    el.textContent = String(e.message ?? e);
  }
}

function color(t) {
  // t in [0, 1], dark blue to yellow
  const r = Math.round(255 * Math.min(1, 2 * t));
  const g = Math.round(255 * t);
  const b = Math.round(160 * (1 - t));
  return `rgb(${r},${g},${b})`;
}

function drawHeat() {
  const nodes = Number($("nodes").value);
  $("nodes-val").textContent = nodes;
  report($("sphere-out"), () => {
    const d = sphere_errors(nodes, SIDE);
    const max = d[0];
    $("sphere-out").textContent = `max d(f, f̂) on the grid: ${max.toExponential(3)}`;
    const ctx = $("heat").getContext("2d");
    const cell = $("heat").width / SIDE;
    const lo = Math.log10(Math.max(max * 1e-4, 1e-16));
    const hi = Math.log10(Math.max(max, 1e-16));
    for (let i = 0; i < SIDE; i++) {
      for (let j = 0; j < SIDE; j++) {
        const v = Math.log10(Math.max(d[1 + i * SIDE + j], 1e-16));
        ctx.fillStyle = color(hi > lo ? Math.min(1, Math.max(0, (v - lo) / (hi - lo))) : 0);
        ctx.fillRect(i * cell, (SIDE - 1 - j) * cell, cell, cell);
      }
    }
  });
}

function drawBounds() {
  const sigma = Number($("sigma").value);
  const h = Number($("curv").value);
  report($("bound-out"), () => {
    const c = bound_curve(sigma, h, 1e-8, 2 * sigma, 120);
    const canvas = $("bounds");
    const ctx = canvas.getContext("2d");
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const xs = [], exact = [], simple = [];
    for (let i = 0; i < c.length; i += 3) {
      xs.push(Math.log10(c[i]));
      exact.push(Math.log10(c[i + 1]));
      simple.push(Math.log10(c[i + 2]));
    }
    const all = exact.concat(simple, xs);
    const [ylo, yhi] = [Math.min(...all), Math.max(...all)];
    const [xlo, xhi] = [xs[0], xs[xs.length - 1]];
    const px = (x) => 40 + ((x - xlo) / (xhi - xlo)) * (canvas.width - 60);
    const py = (y) => canvas.height - 30 - ((y - ylo) / (yhi - ylo)) * (canvas.height - 50);
    const line = (ys, style) => {
      ctx.strokeStyle = style;
      ctx.beginPath();
      ys.forEach((y, i) => (i ? ctx.lineTo(px(xs[i]), py(y)) : ctx.moveTo(px(xs[i]), py(y))));
      ctx.stroke();
    };
    line(xs, "#999");
    line(simple, "#d62");
    line(exact, "#26b");
    ctx.fillStyle = "#222";
    ctx.fillText("log10 ε", canvas.width - 60, canvas.height - 8);
    ctx.fillStyle = "#26b"; ctx.fillText("exact", 50, 20);
    ctx.fillStyle = "#d62"; ctx.fillText("simplified", 100, 20);
    ctx.fillStyle = "#999"; ctx.fillText("ε", 170, 20);
    const k = condition_bounds(sigma, h);
    $("bound-out").textContent = `condition number of exp_p within [${k[0].toPrecision(4)}, ${k[1].toPrecision(4)}]`;
  });
}

function solveTriangle() {
  report($("tri-out"), () => {
    const side = triangle_side(Number($("ta").value), Number($("tb").value), Number($("tc").value), Number($("th").value));
    $("tri-out").textContent = `third side C = ${side.toPrecision(12)}`;
  });
}

await init();
$("nodes").addEventListener("input", drawHeat);
for (const id of ["sigma", "curv"]) $(id).addEventListener("input", drawBounds);
for (const id of ["ta", "tb", "tc", "th"]) $(id).addEventListener("input", solveTriangle);
drawHeat();
drawBounds();
solveTriangle();
