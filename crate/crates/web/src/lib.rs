//! WebAssembly bindings for the demo page in `www/`.

use num_complex::Complex64;
use wasm_bindgen::prelude::*;

use zerocorr::closed_form::{kappa, KappaQuery};
use zerocorr::empirical::{polynomial_roots, sample_su2_polynomial};
use zerocorr::kernels::{fs_scaled_szego, heisenberg_limit_kernel};

fn js_err(e: zerocorr::Error) -> JsError {
    JsError::new(&format!("{}: {e}", e.kind()))
}

/// κ_km sampled at `steps` evenly spaced r in [0, r_max], as interleaved (r, κ).
#[wasm_bindgen]
pub fn kappa_curve(k: usize, m: usize, r_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    let steps = steps.max(2);
    let mut out = Vec::with_capacity(2 * steps);
    for i in 0..steps {
        let r = r_max * i as f64 / (steps - 1) as f64;
        let v = kappa(KappaQuery::new(r, m, k)).map_err(js_err)?;
        out.push(r);
        // the m ≥ 2 curves blow up at the origin
        out.push(if v.is_finite() { v } else { f64::NAN });
    }
    Ok(out)
}

/// Roots of one sampled SU(2) polynomial, scaled by √N, as interleaved (re, im).
/// Only roots within `radius` of the origin in scaled units are returned.
#[wasm_bindgen]
pub fn su2_roots(degree: usize, seed: u64, radius: f64) -> Result<Vec<f64>, JsError> {
    let p = sample_su2_polynomial(degree, seed).map_err(js_err)?;
    let roots = polynomial_roots(&p).map_err(js_err)?;
    let s = (degree as f64).sqrt();
    Ok(roots
        .into_iter()
        .map(|z| z * s)
        .filter(|w| w.norm() <= radius)
        .flat_map(|w| [w.re, w.im])
        .collect())
}

/// Moduli of the scaled level-N Szegő kernel and of its Heisenberg limit
/// along the real axis, |K(0, x)| for x in [0, x_max], as interleaved
/// (x, scaled, limit).
#[wasm_bindgen]
pub fn kernel_profile(level: u32, x_max: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(2);
    let origin = [Complex64::new(0.0, 0.0)];
    let mut out = Vec::with_capacity(3 * steps);
    for i in 0..steps {
        let x = x_max * i as f64 / (steps - 1) as f64;
        let v = [Complex64::new(x, 0.0)];
        out.push(x);
        out.push(fs_scaled_szego(level.max(1), &origin, &v).norm());
        out.push(heisenberg_limit_kernel(&origin, 0.0, &v, 0.0).norm());
    }
    out
}
