import init, { DropSim, eoc_table } from "./pkg/lgswe_demo.js";

const $ = (id) => document.getElementById(id);
let sim = null;
let playing = false;

function colour(v, scale) {
  const s = Math.max(-1, Math.min(1, v / scale));
  const r = s > 0 ? 255 : Math.round(255 * (1 + s));
  const b = s < 0 ? 255 : Math.round(255 * (1 - s));
  const g = Math.round(255 * (1 - Math.abs(s)));
  return `rgb(${r},${g},${b})`;
}

function drawField() {
  const ctx = $("field").getContext("2d");
  const w = $("field").width;
  const xy = sim.vertices();
  const tri = sim.triangles();
  const eta = sim.eta();
  const k = w / 10;
  ctx.clearRect(0, 0, w, w);
  for (let t = 0; t < tri.length; t += 3) {
    const [a, b, c] = [tri[t], tri[t + 1], tri[t + 2]];
    ctx.fillStyle = colour((eta[a] + eta[b] + eta[c]) / 3, 2e-4);
    ctx.beginPath();
    ctx.moveTo(k * xy[2 * a], w - k * xy[2 * a + 1]);
    ctx.lineTo(k * xy[2 * b], w - k * xy[2 * b + 1]);
    ctx.lineTo(k * xy[2 * c], w - k * xy[2 * c + 1]);
    ctx.fill();
  }
}

function drawSeries() {
  const cv = $("series");
  const ctx = cv.getContext("2d");
  const mass = sim.mass_series();
  const l2 = sim.l2_series();
  ctx.clearRect(0, 0, cv.width, cv.height);
  const line = (ys, style) => {
    const top = Math.max(...ys.map(Math.abs), 1e-30);
    ctx.strokeStyle = style;
    ctx.beginPath();
    ys.forEach((y, i) => {
      const px = (i / Math.max(ys.length - 1, 1)) * cv.width;
      const py = cv.height * (1 - y / top) - 1;
      i ? ctx.lineTo(px, py) : ctx.moveTo(px, py);
    });
    ctx.stroke();
  };
  line(mass, "#c33");
  line(l2, "#36c");
  ctx.fillStyle = "#000";
  ctx.fillText("mass (red), L2 (blue), each scaled to its maximum", 6, 12);
}

function reset() {
  sim = new DropSim($("case").value, Number($("n").value), Number($("c0").value), $("lg2").checked);
  $("status").textContent = "t = 0";
  drawField();
  drawSeries();
}

function frame() {
  if (!playing) return;
  try {
    sim.advance(2);
  } catch (e) {
    playing = false;
    $("play").textContent = "play";
    $("status").textContent = String(e);
    return;
  }
  $("status").textContent = `t = ${sim.time().toFixed(2)}`;
  drawField();
  drawSeries();
  if (sim.time() + sim.dt() > 100) {
    playing = false;
    $("play").textContent = "play";
    return;
  }
  requestAnimationFrame(frame);
}

function runEoc() {
  const table = $("eoc-table");
  table.innerHTML = "<tr><th>order</th><th>N</th><th>dt</th><th>E0(eta)</th><th>EOC</th><th>E0(u)</th><th>EOC</th></tr>";
  for (const second of [false, true]) {
    const rows = eoc_table(second, Number($("levels").value));
    for (let i = 0; i < rows.length; i += 4) {
      const rate = (j) => i === 0 ? "" :
        (Math.log(rows[i - 4 + j] / rows[i + j]) / Math.log(rows[i - 3] / rows[i + 1])).toFixed(2);
      const tr = table.insertRow();
      for (const v of [second ? 2 : 1, rows[i], rows[i + 1].toExponential(3),
                       rows[i + 2].toExponential(3), rate(2), rows[i + 3].toExponential(3), rate(3)]) {
        tr.insertCell().textContent = v;
      }
    }
  }
}

await init();
$("reset").onclick = reset;
$("play").onclick = () => {
  playing = !playing;
  $("play").textContent = playing ? "pause" : "play";
  if (playing) requestAnimationFrame(frame);
};
$("eoc").onclick = runEoc;
reset();
