import init, { stabilize, roll, spectrum } from "./pkg/rollctl_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function call(f, ...args) {
  const v = JSON.parse(f(...args));
  if (v.error) throw new Error(v.error);
  return v;
}

function frame(ctx, w, h) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#ddd";
  ctx.strokeRect(40, 10, w - 50, h - 40);
}

// plots several series sharing an x axis; y is scaled per series
function lines(canvas, xs, series) {
  const ctx = canvas.getContext("2d");
  const [w, h] = [canvas.width, canvas.height];
  frame(ctx, w, h);
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const px = (x) => 40 + ((x - x0) / (x1 - x0 || 1)) * (w - 50);
  series.forEach(({ ys, color, label }, k) => {
    const top = Math.max(...ys) || 1;
    const py = (y) => h - 30 - (y / top) * (h - 50);
    ctx.strokeStyle = color;
    ctx.beginPath();
    ys.forEach((y, i) => (i ? ctx.lineTo(px(xs[i]), py(y)) : ctx.moveTo(px(xs[i]), py(y))));
    ctx.stroke();
    ctx.fillStyle = color;
    ctx.fillText(`${label} (max ${top.toExponential(2)})`, 50 + 200 * k, h - 10);
  });
}

function runStab() {
  const s = call(stabilize, num("w1"), num("w2"), num("w3"), num("kv"), 20);
  lines($("stab"), s.t, [
    { ys: s.e_r, color: "#c33", label: "E_R" },
    { ys: s.h, color: "#36c", label: "H" },
  ]);
  $("stab-out").textContent = `final E_R ${s.final_e_r.toExponential(3)}   H increases ${s.h_increases}`;
}

function runRoll() {
  const p = call(roll, $("shape").value, num("kp"), num("kd"), 30);
  const canvas = $("roll");
  const ctx = canvas.getContext("2d");
  const [w, h] = [canvas.width, canvas.height];
  frame(ctx, w, h);
  const all = [...p.x, ...p.xd, ...p.y, ...p.yd];
  const lo = Math.min(...all), hi = Math.max(...all);
  const span = hi - lo || 1;
  const scale = Math.min(w - 50, h - 40) / span;
  const px = (x) => 40 + (x - lo) * scale;
  const py = (y) => h - 30 - (y - lo) * scale;
  const path = (xs, ys, color) => {
    ctx.strokeStyle = color;
    ctx.beginPath();
    xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(ys[i])) : ctx.moveTo(px(x), py(ys[i]))));
    ctx.stroke();
  };
  path(p.xd, p.yd, "#aaa");
  path(p.x, p.y, "#c33");
  $("roll-out").textContent = `grey: reference   red: contact point   final error ${p.final_error.toExponential(3)} m`;
}

function runSpec() {
  const s = call(spectrum, num("tx"), num("ty"), 0, 0, 0, 0);
  const canvas = $("spec");
  const ctx = canvas.getContext("2d");
  const [w, h] = [canvas.width, canvas.height];
  frame(ctx, w, h);
  // log10 bars, one group per test
  const groups = [
    ["local", s.local, "#36c"],
    ["fiber", s.fiber, "#c33"],
    ["fiber, all brackets", s.fiber_all_brackets, "#393"],
  ];
  const logs = groups.flatMap(([, v]) => v.map((x) => Math.log10(Math.max(x, 1e-16))));
  const lo = Math.min(...logs, -12), hi = Math.max(...logs, 1);
  let col = 0;
  const bw = (w - 60) / (logs.length + groups.length);
  for (const [name, v, color] of groups) {
    ctx.fillStyle = color;
    ctx.fillText(name, 45 + col * bw, 24);
    for (const x of v) {
      const y = (Math.log10(Math.max(x, 1e-16)) - lo) / (hi - lo);
      ctx.fillRect(45 + col * bw, h - 30 - y * (h - 60), bw * 0.8, y * (h - 60));
      col += 1;
    }
    col += 1;
  }
  ctx.fillStyle = "#222";
  ctx.fillText(`log10 scale, ${lo.toFixed(0)} to ${hi.toFixed(0)}`, 45, h - 10);
  $("spec-out").textContent = `local rank ${s.local_rank}/6   fiber rank ${s.fiber_rank}/5`;
}

function wire(id, f) {
  $(id).addEventListener("click", () => {
    try {
      f();
      $("status").textContent = "ready";
    } catch (e) {
      $("status").textContent = `error: ${e.message}`;
    }
  });
}

await init();
$("status").textContent = "ready";
wire("run-stab", runStab);
wire("run-roll", runRoll);
wire("run-spec", runSpec);
runStab();
runRoll();
runSpec();
