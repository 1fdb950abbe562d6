//! Composite Gauss-Legendre rules.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Nodes and weights of a composite rule: `n` points on each panel between
/// consecutive `breaks`.
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn composite(breaks: &[f64], n: usize) -> Rule {
        let gl = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
        let pairs = gl.as_node_weight_pairs();
        let mut nodes = Vec::with_capacity(pairs.len() * breaks.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for &(x, wt) in pairs {
                nodes.push(mid + half * x);
                weights.push(half * wt);
            }
        }
        Rule { nodes, weights }
    }

    /// `panels` equal panels on `[a, b]`.
    pub fn uniform(a: f64, b: f64, panels: usize, n: usize) -> Rule {
        let breaks: Vec<f64> = (0..=panels)
            .map(|i| a + (b - a) * i as f64 / panels as f64)
            .collect();
        Rule::composite(&breaks, n)
    }

    /// Panels on `[a, b]`, `0 < a < b`, with geometrically growing lengths.
    pub fn geometric(a: f64, b: f64, panels: usize, n: usize) -> Rule {
        let r = (b / a).ln();
        let breaks: Vec<f64> = (0..=panels)
            .map(|i| a * (r * i as f64 / panels as f64).exp())
            .collect();
        Rule::composite(&breaks, n)
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_and_singular_weights() {
        let r = Rule::uniform(0.0, 2.0, 3, 4);
        assert!((r.integrate(|x| x.powi(7)) - 32.0).abs() < 1e-11);
        let g = Rule::geometric(1e-3, 1.0, 30, 10);
        assert!((g.integrate(|x| 1.0 / x) - 1e3f64.ln()).abs() < 1e-12);
    }
}
