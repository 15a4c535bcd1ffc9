// Demo page wiring. All math lives in the wasm module; this file only moves
// JSON around and draws on the canvas.

import init, {
  list_spaces,
  run_eigen_sweep,
  run_fiber_walk_sl3,
  run_curvature_probe,
} from "./pkg/eigenfiber_wasm.js";

const $ = (id) => document.getElementById(id);
const status = $("status");

function fmt(x, digits = 3) {
  if (x === null || x === undefined) return "";
  if (x === 0) return "0";
  const a = Math.abs(x);
  return a >= 1e-3 && a < 1e4 ? x.toPrecision(10).replace(/\.?0+$/, "") : x.toExponential(digits);
}

function badge(ok, yes = "pass", no = "fail") {
  return `<span class="badge ${ok ? "ok" : "bad"}">${ok ? yes : no}</span>`;
}

function busy(button, f) {
  return async () => {
    button.disabled = true;
    status.textContent = "";
    try {
      await new Promise((r) => setTimeout(r, 10)); // let the button repaint
      f();
    } catch (e) {
      status.textContent = String(e);
    } finally {
      button.disabled = false;
    }
  };
}

// ---- panel 1: spectrum sweep -------------------------------------------

function runSweep() {
  const family = $("sw-family").value;
  const n = +$("sw-n").value;
  const out = JSON.parse(run_eigen_sweep(family, n, +$("sw-points").value, +$("sw-seed").value));
  if (out.error) {
    $("sw-out").innerHTML = `<p class="cert">${out.error}</p>`;
    return;
  }
  const rows = [
    ["space", out.space, "compact dual", out.dual_space],
    ["fitted &lambda;", fmt(out.fitted_lambda), "dual &lambda;*", fmt(out.dual_lambda)],
    ["fitted &mu;", fmt(out.fitted_mu), "dual &mu;*", fmt(out.dual_mu)],
    ["resolved &lambda; candidate", fmt(out.lambda_resolved), "candidates", out.lambda_candidates.map((c) => fmt(c)).join(" / ")],
    ["max &tau; residual", fmt(out.max_tau_residual), "max &kappa; residual", fmt(out.max_kappa_residual)],
  ];
  $("sw-out").innerHTML = `
    <p>${badge(out.pass)} identities &tau;&phi; = &lambda;&phi;, &kappa;(&phi;,&phi;) = &mu;&phi;&#178;
       on ${out.points} random points, and (&lambda;*, &mu;*) = (&minus;&lambda;, &minus;&mu;) on the dual.</p>
    <table>${rows
      .map((r) => `<tr><th>${r[0]}</th><td class="num">${r[1]}</td><th>${r[2]}</th><td class="num">${r[3]}</td></tr>`)
      .join("")}</table>
    <p class="cert">a = ${out.params.a.join(", ")}${out.params.b ? `\nb = ${out.params.b.join(", ")}` : ""}</p>`;
}

// ---- panel 2: fiber walk -------------------------------------------------

let walkData = null;

function drawWalk() {
  const canvas = $("fw-canvas");
  const ctx = canvas.getContext("2d");
  const W = (canvas.width = canvas.clientWidth * devicePixelRatio);
  const H = (canvas.height = canvas.clientHeight * devicePixelRatio);
  ctx.clearRect(0, 0, W, H);
  if (!walkData) return;
  const theta = +$("fw-angle").value / 100;
  const pts = walkData.points.map(([u, v, w]) => {
    // center the chart coordinates, then rotate (v, w) around the u axis
    const x = v * Math.cos(theta) + w * Math.sin(theta);
    const z = -v * Math.sin(theta) + w * Math.cos(theta);
    const y = Math.log(u); // u > 0; log makes the axis symmetric around 1
    return [x, y - 0.35 * z, z];
  });
  const xs = pts.map((p) => p[0]);
  const ys = pts.map((p) => p[1]);
  const pad = 26 * devicePixelRatio;
  const xmin = Math.min(...xs), xmax = Math.max(...xs);
  const ymin = Math.min(...ys), ymax = Math.max(...ys);
  const sx = (x) => pad + ((x - xmin) / (xmax - xmin || 1)) * (W - 2 * pad);
  const sy = (y) => H - pad - ((y - ymin) / (ymax - ymin || 1)) * (H - 2 * pad);
  ctx.lineWidth = devicePixelRatio;
  ctx.strokeStyle = "#b9c6e4";
  ctx.beginPath();
  pts.forEach((p, i) => (i ? ctx.lineTo(sx(p[0]), sy(p[1])) : ctx.moveTo(sx(p[0]), sy(p[1]))));
  ctx.stroke();
  pts.forEach((p, i) => {
    const t = i / (pts.length - 1 || 1);
    ctx.fillStyle = `hsl(${225 - 140 * t} 70% ${35 + 25 * p[2] / (Math.abs(p[2]) + 1)}%)`;
    ctx.beginPath();
    ctx.arc(sx(p[0]), sy(p[1]), (i === 0 ? 5 : 3) * devicePixelRatio, 0, 7);
    ctx.fill();
  });
}

function runWalk() {
  const out = JSON.parse(
    run_fiber_walk_sl3(+$("fw-steps").value, +$("fw-size").value, +$("fw-seed").value)
  );
  if (out.error) {
    $("fw-cert").textContent = out.error;
    walkData = null;
    drawWalk();
    return;
  }
  walkData = out;
  drawWalk();
  $("fw-cert").textContent =
    `samples: ${out.points.length}   max |phi|: ${fmt(out.max_phi_abs)}   ` +
    `max membership residual: ${fmt(out.max_membership_residual)}\n` +
    `min regularity margin: ${fmt(out.min_regularity_margin)}   ` +
    `(dark dot = start at the identity coset, chart point (1, 0, 0))`;
}

// ---- panel 3: curvature probe --------------------------------------------

function runProbe() {
  const family = $("cv-family").value;
  const out = JSON.parse(
    run_curvature_probe(family, +$("cv-n").value, +$("cv-h").value, +$("cv-level").value, +$("cv-seed").value)
  );
  if (out.error) {
    $("cv-out").innerHTML = `<p class="cert">${out.error}</p>`;
    return;
  }
  const maxv = Math.max(...out.mean_curvature, 1e-12);
  const bars = out.mean_curvature
    .map((v, i) => {
      const wpct = Math.max(100 * Math.sqrt(v / maxv), 1);
      return `<div class="bar" style="width:${wpct}%">h = ${fmt(out.h[i])} &rarr; &#8214;H&#8214; = ${fmt(v)}</div>`;
    })
    .join("");
  $("cv-out").innerHTML = `
    <p>${badge(out.minimal, "minimal", "not minimal")} level ${out.level} on ${out.space}</p>
    <div class="bars">${bars}</div>
    <p class="cert">${
      out.level === 0
        ? "The estimate collapses with h: the zero fiber is minimal to numerical precision."
        : "The estimate stalls at the level set's actual curvature: a shifted level set is not minimal."
    }</p>`;
}

// ---- init -----------------------------------------------------------------

await init();
const spaces = JSON.parse(list_spaces()).filter((s) => !s.compact_dual);
for (const sel of [$("sw-family"), $("cv-family")]) {
  sel.innerHTML = spaces.map((s) => `<option value="${s.family}">${s.family}</option>`).join("");
}
$("sw-run").onclick = busy($("sw-run"), runSweep);
$("fw-run").onclick = busy($("fw-run"), runWalk);
$("cv-run").onclick = busy($("cv-run"), runProbe);
$("fw-angle").oninput = drawWalk;
new ResizeObserver(drawWalk).observe($("fw-canvas"));
