use num_complex::Complex64;
use serde::Serialize;

use super::PairClass;
use crate::error::{Error, Result};
use crate::states::{qubit_amplitudes, InitialKind, InitialSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SteadyEdge {
    /// 1-based qubit labels, `a < b`.
    pub a: usize,
    pub b: usize,
    pub class: PairClass,
    pub weight: f64,
}

/// Stationary pairwise concurrences as a complete weighted graph on the
/// qubits. Qubits 1 and 2 are the initially superposed `k` and `l`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SteadyGraph {
    pub n: usize,
    pub edges: Vec<SteadyEdge>,
}

impl SteadyGraph {
    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.edges.iter().find(|e| e.a == a && e.b == b).map(|e| e.weight)
    }

    /// Edges at least `min_weight` heavy, heaviest first.
    pub fn leading_edges(&self, min_weight: f64) -> Vec<SteadyEdge> {
        let mut out: Vec<_> = self.edges.iter().copied().filter(|e| e.weight >= min_weight).collect();
        out.sort_by(|x, y| y.weight.total_cmp(&x.weight));
        out
    }

    /// Sum of edge weights at a vertex.
    pub fn strength(&self, v: usize) -> f64 {
        self.edges.iter().filter(|e| e.a == v || e.b == v).map(|e| e.weight).sum()
    }
}

fn edge_class(a: usize, b: usize) -> PairClass {
    match (a <= 2, b <= 2) {
        (true, true) => PairClass::Kl,
        (false, false) => PairClass::Jm,
        _ => PairClass::Kj,
    }
}

/// Steady-state correlation graph: each edge carries `2 |a_i| |a_j|` with
/// `a_i` the stationary amplitude on qubit `i`.
pub fn steady_graph(n: usize, spec: &InitialSpec) -> Result<SteadyGraph> {
    if spec.kind != InitialKind::TwoQubitSuperposition {
        return Err(Error::invalid("steady graph needs a two-qubit superposition spec"));
    }
    if n < 2 {
        return Err(Error::invalid("steady graph needs at least two qubits"));
    }
    let amps = qubit_amplitudes(n, spec, Complex64::new(0.0, 0.0))?;
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for a in 1..=n {
        for b in a + 1..=n {
            edges.push(SteadyEdge {
                a,
                b,
                class: edge_class(a, b),
                weight: 2.0 * amps[a - 1].norm() * amps[b - 1].norm(),
            });
        }
    }
    Ok(SteadyGraph { n, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_excitation_star() {
        let g = steady_graph(5, &InitialSpec::two_qubit(-1.0, 0.0).unwrap()).unwrap();
        assert_eq!(g.edges.len(), 10);
        for leaf in 2..=5 {
            assert_abs_diff_eq!(g.weight(1, leaf).unwrap(), 0.32, epsilon = 1e-15);
        }
        for a in 2..=5 {
            for b in a + 1..=5 {
                assert_abs_diff_eq!(g.weight(a, b).unwrap(), 0.08, epsilon = 1e-15);
            }
        }
        // hub is the initially excited qubit
        let hub = (1..=5).max_by(|&x, &y| g.strength(x).total_cmp(&g.strength(y))).unwrap();
        assert_eq!(hub, 1);
    }

    #[test]
    fn other_qubit_is_hub_for_s_plus_one() {
        let g = steady_graph(6, &InitialSpec::two_qubit(1.0, 0.0).unwrap()).unwrap();
        let hub = (1..=6).max_by(|&x, &y| g.strength(x).total_cmp(&g.strength(y))).unwrap();
        assert_eq!(hub, 2);
    }

    #[test]
    fn two_qubits_have_no_stationary_edge() {
        let g = steady_graph(2, &InitialSpec::two_qubit(0.0, 0.0).unwrap()).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].weight, 0.0);
    }

    #[test]
    fn four_qubits_maximally_entangled() {
        let g = steady_graph(4, &InitialSpec::two_qubit(0.0, 0.0).unwrap()).unwrap();
        for e in &g.edges {
            assert_abs_diff_eq!(e.weight, 0.25, epsilon = 1e-15);
        }
        assert_eq!(g.edges.iter().filter(|e| e.class == PairClass::Kj).count(), 4);
    }

    #[test]
    fn bipartite_shape_for_large_n() {
        let g = steady_graph(10, &InitialSpec::two_qubit(0.0, 0.0).unwrap()).unwrap();
        let lead = g.leading_edges(0.1);
        assert_eq!((lead[0].a, lead[0].b), (1, 2));
        assert!(lead[1..].iter().all(|e| e.class == PairClass::Kj));
        assert_eq!(lead.len(), 1 + 2 * 8);
    }

    #[test]
    fn rejects_w_state() {
        assert!(steady_graph(4, &InitialSpec::w_state()).is_err());
    }
}
