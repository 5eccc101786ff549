//! Gauss-Legendre rules on intervals and piecewise (composite) integration
//! across breakpoints.

use gauss_quad::legendre::GaussLegendre;

/// Nodes and weights of an `order`-point Gauss-Legendre rule mapped to `[a, b]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Self {
        let order = order.max(2);
        let gl = GaussLegendre::new(order).expect("order >= 2");
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut pairs: Vec<(f64, f64)> = gl
            .iter()
            .map(|(x, w)| (mid + half * x, half * w))
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        Rule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }
}

/// Composite rule on `[a, b]`: the interval is cut at every breakpoint
/// strictly inside it, each piece is split into `panels` equal panels and
/// integrated with an `order`-point rule. Integrand values exactly at
/// breakpoints are never requested.
pub fn composite(a: f64, b: f64, breakpoints: &[f64], panels: usize, order: usize) -> Rule {
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breakpoints.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-14 * (1.0 + y.abs()));
    let base = GaussLegendre::new(order.max(2)).expect("order >= 2");
    let mut base_pairs: Vec<(f64, f64)> = base.iter().map(|(x, w)| (*x, *w)).collect();
    base_pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for win in cuts.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let h = (hi - lo) / panels.max(1) as f64;
        for p in 0..panels.max(1) {
            let pa = lo + p as f64 * h;
            let mid = pa + 0.5 * h;
            for &(x, w) in &base_pairs {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
    }
    Rule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let r = Rule::gauss_legendre(5, -1.0, 2.0);
        let v = r.integrate(|x| x.powi(9));
        assert!((v - (2f64.powi(10) - 1.0) / 10.0).abs() < 1e-12);
    }

    #[test]
    fn composite_handles_jump() {
        let r = composite(-1.0, 1.0, &[0.0], 2, 8);
        let v = r.integrate(|x| if x < 0.0 { 1.0 } else { 3.0 * x * x });
        assert!((v - 2.0).abs() < 1e-13);
        assert!(r.nodes.iter().all(|&x| x != 0.0));
    }
}
