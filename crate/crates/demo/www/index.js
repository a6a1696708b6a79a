import init, { analyze, sourceMatrix, buildAndSimulate, bundledNetworks } from "./pkg/circshift_demo.js";

const $ = (id) => document.getElementById(id);

function fail(target, e) {
  target.innerHTML = "";
  const p = document.createElement("p");
  p.className = "err";
  p.textContent = String(e.message ?? e);
  target.appendChild(p);
}

function cell(row, text, cls) {
  const td = document.createElement("td");
  td.textContent = text;
  if (cls) td.className = cls;
  row.appendChild(td);
}

function table(headers, rows) {
  const t = document.createElement("table");
  const head = t.insertRow();
  for (const h of headers) {
    const th = document.createElement("th");
    th.textContent = h;
    head.appendChild(th);
  }
  for (const r of rows) {
    const tr = t.insertRow();
    for (const [text, cls] of r) cell(tr, text, cls);
  }
  return t;
}

function onAnalyze(ev) {
  ev.preventDefault();
  const f = new FormData(ev.target);
  try {
    const v = JSON.parse(analyze(+f.get("l"), +f.get("delta"), +f.get("receivers")));
    const lines = [
      `m_L = ${v.m_L}`,
      `phi(L) = ${v.phi}    rate phi/L = ${v.phi}/${v.L}`,
      `modulus = ${v.modulus}`,
      `cosets = ${v.cosets.map((c) => "{" + c.join(",") + "}").join(" ")}`,
    ];
    if (v.delta !== undefined) {
      lines.push(`K_delta = ${v.K_delta}`);
      lines.push(`floor(m_L K_delta / phi) = ${v.bound} -> ${v.guaranteed ? "success guaranteed" : "not guaranteed"}`);
    }
    $("analyze-out").textContent = lines.join("\n");
  } catch (e) {
    fail($("analyze-out"), e);
  }
}

function onMatrix(ev) {
  ev.preventDefault();
  const f = new FormData(ev.target);
  try {
    const v = JSON.parse(sourceMatrix(+f.get("l"), f.get("indices")));
    $("matrix-out").textContent = `G (${v.J} x ${v.L})\n` + v.G.join("\n");
  } catch (e) {
    fail($("matrix-out"), e);
  }
}

function onSimulate(ev) {
  ev.preventDefault();
  const f = new FormData(ev.target);
  const out = $("sim-out");
  try {
    const v = JSON.parse(buildAndSimulate(f.get("network"), +f.get("l"), +f.get("delta"), +f.get("seed")));
    out.innerHTML = "";
    const summary = document.createElement("p");
    summary.textContent =
      `rate ${v.rate}, index set {${v.J_set.join(",")}}, ` +
      `${v.shifts} shifts and ${v.xors} XORs per message. Source rows: ${v.message.join(" | ")}`;
    out.appendChild(summary);
    out.appendChild(
      table(
        ["edge", "tail", "head", "kernels", "unit"],
        v.edges.map((e) => [
          [`e${e.id}`],
          [e.tail],
          [e.head],
          [e.kernels.map((k) => `e${k.from}: ${k.poly}`).join(", ")],
          [e.unit, "bits"],
        ]),
      ),
    );
    out.appendChild(
      table(
        ["receiver", "decoded", "match"],
        v.receivers.map((r) => [[r.name], [r.decoded.join(" | "), "bits"], [r.ok ? "yes" : "NO", r.ok ? "ok" : "err"]]),
      ),
    );
  } catch (e) {
    fail(out, e);
  }
}

async function main() {
  try {
    await init();
  } catch (e) {
    $("status").textContent = "Could not load the module; build it into www/pkg first (see README).";
    return;
  }
  $("status").textContent = "";
  const select = document.querySelector("#sim-form select");
  for (const name of JSON.parse(bundledNetworks())) {
    const opt = document.createElement("option");
    opt.value = opt.textContent = name;
    if (name === "combination-4-2") opt.selected = true;
    select.appendChild(opt);
  }
  $("analyze-form").addEventListener("submit", onAnalyze);
  $("matrix-form").addEventListener("submit", onMatrix);
  $("sim-form").addEventListener("submit", onSimulate);
}

main();
