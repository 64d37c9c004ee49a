import init, { generate, check, solve, prism } from "./pkg/hypdel_web.js";

const $ = (id) => document.getElementById(id);

function show(el, fn) {
  el.classList.remove("error");
  try {
    return fn();
  } catch (e) {
    el.classList.add("error");
    el.textContent = String(e);
    return null;
  }
}

function fmt(v) {
  return typeof v === "number" ? v.toPrecision(10) : JSON.stringify(v);
}

function table(obj, keys) {
  return keys.map((k) => `${k.padEnd(26)} ${fmt(obj[k])}`).join("\n");
}

function regenerate(random) {
  const genus = Number($("genus").value);
  const faces = Number($("faces").value);
  const seed = random ? BigInt($("seed").value) : undefined;
  const text = show($("check-out"), () => generate(genus, faces, seed));
  if (text !== null) $("instance").value = text;
}

function runCheck() {
  const out = $("check-out");
  const r = show(out, () => JSON.parse(check($("instance").value)));
  if (r === null) return;
  let text = table(r, ["faces", "edges", "vertices", "feasible", "epsilon_star"]);
  if (r.brute_force) {
    text += "\n" + table(r.brute_force, ["feasible", "margin", "witness"]);
  }
  out.textContent = text;
}

function runSolve() {
  const out = $("solve-out");
  $("disk").innerHTML = "";
  const r = show(out, () => JSON.parse(solve($("instance").value, $("circles").checked)));
  if (r === null) return;
  out.textContent = table(r, [
    "iterations", "residual", "objective",
    "circumcircle_angle_error", "holonomy_defect", "edge_mismatch",
  ]);
  $("disk").innerHTML = r.svg;
}

function runPrism() {
  const [a, b, c] = ["pa", "pb", "pc"].map((id) => Number($(id).value));
  $("va").textContent = ` ${a.toFixed(2)}`;
  $("vb").textContent = ` ${b.toFixed(2)}`;
  $("vc").textContent = ` ${c.toFixed(2)}`;
  const out = $("prism-out");
  if (a + b + c >= Math.PI) {
    out.classList.add("error");
    out.textContent = `angle sum ${(a + b + c).toFixed(3)} is not below π: no hyperbolic triangle`;
    return;
  }
  const r = show(out, () => JSON.parse(prism(a, b, c)));
  if (r === null) return;
  out.textContent = table(r, ["volume", "lengths", "vertical", "top", "expected_top"]);
}

await init();
$("gen-sym").onclick = () => regenerate(false);
$("gen-rand").onclick = () => regenerate(true);
$("check").onclick = runCheck;
$("solve").onclick = runSolve;
for (const id of ["pa", "pb", "pc"]) $(id).oninput = runPrism;
regenerate(false);
runPrism();
