import init, { nodal_figure, torus_zeros, sphere_growth } from "./pkg/nodal_lab_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(el, f) {
  try {
    el.classList.remove("err");
    return f();
  } catch (e) {
    el.classList.add("err");
    el.textContent = String(e.message ?? e);
  }
}

const labels = { torus: ["k₁", "k₂"], sphere: ["N", "m"], disc: ["m", "n"] };

function drawNodal() {
  show($("n-meta"), () => {
    const out = JSON.parse(nodal_figure($("n-surface").value, num("n-a"), num("n-b"), $("n-sin").checked, num("n-grid")));
    $("nodal-svg").innerHTML = out.svg;
    $("n-meta").textContent = JSON.stringify(out.meta, null, 2);
  });
}

function countZeros() {
  show($("z-out"), () => {
    const out = JSON.parse(torus_zeros(num("z-k1"), num("z-k2"), $("z-sin").checked, num("z-angle"), num("z-len"), num("z-tau")));
    const rows = out.zeros.map(([t, tau, k]) => `t = ${t.toFixed(6)}  τ = ${tau.toExponential(1)}  ×${k}`);
    $("z-out").textContent =
      `argument principle: ${out.count} (residual ${out.residual.toExponential(1)})\n` +
      `closed form:        ${out.closed_form}\nlocated:            ${out.located}\n\n` + rows.join("\n");
  });
}

function growth() {
  show($("g-out"), () => {
    const out = JSON.parse(sphere_growth(num("g-n"), num("g-m"), num("g-r"), num("g-beta")));
    $("g-out").textContent =
      `λ = ${out.lambda.toFixed(4)}\nu = (1/λ) log|φ(z)|² = ${out.u.toFixed(4)}\n2√ρ = ${out.two_sqrt_rho.toFixed(4)}\n` +
      `envelope constant C = ${out.envelope.toFixed(3)}`;
  });
}

await init();
$("n-surface").addEventListener("change", () => {
  const [a, b] = labels[$("n-surface").value];
  $("n-alabel").textContent = a;
  $("n-blabel").textContent = b;
});
$("n-go").addEventListener("click", drawNodal);
$("z-go").addEventListener("click", countZeros);
for (const id of ["g-n", "g-m", "g-r", "g-beta"]) $(id).addEventListener("input", growth);
drawNodal();
countZeros();
growth();
