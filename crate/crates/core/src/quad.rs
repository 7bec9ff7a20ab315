//! Composite Gauss–Legendre quadrature with cached rules.

use gauss_quad::GaussLegendre;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// `(node, weight)` pairs on `[-1, 1]`.
pub fn legendre_rule(n: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&n) {
        return r.clone();
    }
    let rule = GaussLegendre::new(n.try_into().expect("at least two nodes"));
    let nodes: Arc<Vec<(f64, f64)>> = Arc::new(rule.iter().copied().collect());
    cache.lock().unwrap().insert(n, nodes.clone());
    nodes
}

/// Nodes and weights of an `n`-point rule on each of `panels` equal pieces of `[a, b]`.
pub fn composite_nodes(a: f64, b: f64, panels: usize, n: usize) -> Vec<(f64, f64)> {
    if b <= a {
        return Vec::new();
    }
    let rule = legendre_rule(n);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * n);
    for k in 0..panels {
        let mid = a + h * (k as f64 + 0.5);
        out.extend(rule.iter().map(|&(x, w)| (mid + 0.5 * h * x, 0.5 * h * w)));
    }
    out
}

/// Same as [`composite_nodes`], with panel boundaries forced at every `breaks`
/// point inside `(a, b)`.
pub fn composite_nodes_with_breaks(a: f64, b: f64, breaks: &[f64], panels: usize, n: usize) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .flat_map(|w| {
            let share = ((panels as f64) * (w[1] - w[0]) / (b - a)).ceil().max(1.0) as usize;
            composite_nodes(w[0], w[1], share, n)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_and_smooth_functions() {
        let s: f64 = composite_nodes(0.0, 2.0, 1, 8).iter().map(|&(x, w)| w * x.powi(7)).sum();
        assert!((s - 32.0).abs() < 1e-12);
        let s: f64 = composite_nodes(0.0, 1.0, 4, 16).iter().map(|&(x, w)| w * x.exp()).sum();
        assert!((s - (1f64.exp() - 1.0)).abs() < 1e-14);
        let s: f64 = composite_nodes_with_breaks(0.0, 1.0, &[0.3], 2, 8)
            .iter()
            .map(|&(x, w)| w * if x < 0.3 { 1.0 } else { 0.0 })
            .sum();
        assert!((s - 0.3).abs() < 1e-14);
    }
}
