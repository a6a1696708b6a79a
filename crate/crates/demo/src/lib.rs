//! Browser bindings. Each export returns a JSON string; the plain functions
//! underneath are usable (and tested) natively.

use circshift::builder::{construct, feasibility_from, k_delta, DEFAULT_POOL_CAP};
use circshift::circcode::{source_matrix, CircularShiftCode};
use circshift::field::FieldContext;
use circshift::format::load_network;
use circshift::networks;
use circshift::simulate::{encode_source, propagate, shift_op_count, SourceMessage};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn context(l: usize) -> Result<FieldContext, String> {
    FieldContext::new(l).map_err(|e| e.to_string())
}

/// Field parameters for `L`, plus `K_delta` and the feasibility bound for
/// `receivers` when `delta > 0`.
pub fn analyze_value(l: usize, delta: usize, receivers: usize) -> Result<Value, String> {
    let ctx = context(l)?;
    let mut out = json!({
        "L": l,
        "m_L": ctx.degree(),
        "phi": ctx.phi(),
        "modulus": ctx.modulus().to_string(),
        "cosets": ctx.cosets(),
        "coprime": ctx.coprime(),
    });
    if delta > 0 {
        let k = k_delta(&ctx, delta, DEFAULT_POOL_CAP).map_err(|e| e.to_string())?;
        let f = feasibility_from(ctx.degree(), ctx.phi(), k, receivers);
        out["delta"] = json!(delta);
        out["K_delta"] = json!(k.to_string());
        out["bound"] = json!(f.bound.to_string());
        out["guaranteed"] = json!(f.guaranteed);
    }
    Ok(out)
}

/// Parses `"1, 2, 4"` style index lists.
fn parse_indices(text: &str) -> Result<Vec<usize>, String> {
    text.split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("not an index: {s:?}")))
        .collect()
}

/// The binary source matrix for an index set, or the reason it is invalid.
pub fn source_matrix_value(l: usize, indices: &str) -> Result<Value, String> {
    let ctx = context(l)?;
    let js = parse_indices(indices)?;
    let (g, _) = source_matrix(&js, &ctx, 1).map_err(|e| e.to_string())?;
    Ok(json!({ "L": l, "J": js.len(), "G": g.to_bitstrings() }))
}

/// Builds a code on a bundled network, pushes one seeded random message
/// through it and reports every edge unit and each receiver's decode.
pub fn build_and_simulate_value(network: &str, l: usize, delta: usize, seed: u64) -> Result<Value, String> {
    let text = networks::bundled(network).ok_or_else(|| format!("unknown network {network:?}"))?;
    let net = load_network(text).map_err(|e| e.to_string())?;
    let ctx = context(l)?;
    let scalar = construct(&net, &ctx, delta).map_err(|e| e.to_string())?;
    let code = CircularShiftCode::build(&scalar, &net, &ctx).map_err(|e| e.to_string())?;
    let (j, _) = code.rate();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let msg = SourceMessage::random(net.omega(), j, &mut rng);
    let gs = code.gs().ok_or("no source matrix")?;
    let source = encode_source(&msg, gs, l).map_err(|e| e.to_string())?;
    let prop = propagate(&net, &code, &source).map_err(|e| e.to_string())?;

    let edges: Vec<Value> = net
        .edges()
        .iter()
        .map(|e| {
            let kernels: Vec<Value> = net
                .in_edges(e.tail)
                .iter()
                .filter_map(|&d| {
                    code.kernel_polys()
                        .get(&(d, e.id))
                        .map(|p| json!({ "from": d, "poly": p.to_string() }))
                })
                .collect();
            json!({
                "id": e.id,
                "tail": net.node_name(e.tail),
                "head": net.node_name(e.head),
                "unit": prop.unit(e.id).to_bitstring(),
                "kernels": kernels,
            })
        })
        .collect();
    let mut receivers = Vec::new();
    for &t in net.receivers() {
        let d = code.decoder(t).ok_or("missing decoder")?;
        let decoded = circshift::simulate::decode(&prop.received(&net, t), d, net.omega()).map_err(|e| e.to_string())?;
        receivers.push(json!({
            "name": net.node_name(t),
            "decoded": decoded.rows().iter().map(|r| r.to_bitstring()).collect::<Vec<_>>(),
            "ok": decoded == msg,
        }));
    }
    let ops = shift_op_count(&net, &code).total;
    Ok(json!({
        "network": network,
        "L": l,
        "delta": delta,
        "J_set": code.solution_indices(),
        "rate": format!("{j}/{l}"),
        "message": msg.rows().iter().map(|r| r.to_bitstring()).collect::<Vec<_>>(),
        "edges": edges,
        "receivers": receivers,
        "shifts": ops.shifts,
        "xors": ops.unit_xors,
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn analyze(l: usize, delta: usize, receivers: usize) -> Result<String, JsError> {
    to_js(analyze_value(l, delta, receivers))
}

#[wasm_bindgen(js_name = sourceMatrix)]
pub fn source_matrix_js(l: usize, indices: &str) -> Result<String, JsError> {
    to_js(source_matrix_value(l, indices))
}

#[wasm_bindgen(js_name = buildAndSimulate)]
pub fn build_and_simulate(network: &str, l: usize, delta: usize, seed: u32) -> Result<String, JsError> {
    to_js(build_and_simulate_value(network, l, delta, seed as u64))
}

#[wasm_bindgen(js_name = bundledNetworks)]
pub fn bundled_networks() -> String {
    json!(networks::BUNDLED.iter().map(|(n, _)| *n).collect::<Vec<_>>()).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_l7() {
        let v = analyze_value(7, 1, 6).unwrap();
        assert_eq!(v["m_L"], 3);
        assert_eq!(v["phi"], 6);
        assert_eq!(v["K_delta"], "8");
        assert_eq!(v["guaranteed"], false);
        assert!(analyze_value(8, 0, 0).is_err());
    }

    #[test]
    fn source_matrix_l7() {
        let v = source_matrix_value(7, "1, 2,4").unwrap();
        assert_eq!(v["G"], json!(["1110100", "0011101", "0111010"]));
        assert!(source_matrix_value(7, "1,2").unwrap_err().contains("doubling"));
        assert!(source_matrix_value(7, "x").is_err());
    }

    #[test]
    fn simulate_every_bundled_network() {
        for (name, l, delta) in [("fig1", 9, 2), ("combination-4-2", 7, 1), ("butterfly", 11, 1)] {
            let v = build_and_simulate_value(name, l, delta, 5).unwrap();
            let receivers = v["receivers"].as_array().unwrap();
            assert!(receivers.iter().all(|r| r["ok"] == true), "{name}");
        }
        let a = build_and_simulate_value("butterfly", 11, 1, 1).unwrap();
        assert_eq!(a, build_and_simulate_value("butterfly", 11, 1, 1).unwrap());
        assert!(build_and_simulate_value("nope", 7, 1, 0).is_err());
    }
}
