//! Diagrams of free abelian groups over the linear category and over the
//! cube, the conversion functors between them, and totalization into a
//! chain complex.
//!
//! A `LinearDiagram` is a chain complex presented as generator sets
//! `F(0..=n)` with integer matrices `F(i+1 → i)` whose consecutive
//! composites vanish. A `CubeDiagram` assigns generator sets to the
//! vertices of `{0,1}ⁿ` and matrices to its edges so that every square
//! commutes (unsigned). Totalization collapses a cube to a chain complex
//! using the edge sign `(−1)^{u₁+⋯+u_{k−1}}`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::intmat::IntMat;
use crate::Vertex;

pub type Gen = u64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CubeError {
    #[error("u - v is not a unit vector (u = {u:#b}, v = {v:#b})")]
    NotAnEdge { u: Vertex, v: Vertex },
    #[error("square at u = {u:#b} in directions ({k}, {l}) does not commute")]
    NonCommutingSquare { u: Vertex, k: usize, l: usize },
    #[error("matrix shape does not match generator sets at {at}")]
    ShapeMismatch { at: String },
    #[error("composite of consecutive differentials is nonzero at grading {0}")]
    NotAComplex(usize),
}

/// The sign `(−1)^{u₁+⋯+u_{k−1}}` attached to the edge `u → v = u − ê_k`.
pub fn edge_sign(u: Vertex, v: Vertex) -> Result<i64, CubeError> {
    let diff = u ^ v;
    if diff == 0 || !diff.is_power_of_two() || (u & diff) == 0 {
        return Err(CubeError::NotAnEdge { u, v });
    }
    let k = diff.trailing_zeros();
    let below = u & ((1u32 << k) - 1);
    Ok(if below.count_ones() % 2 == 0 { 1 } else { -1 })
}

/// A functor from the linear category sending length-two arrows to zero:
/// generator sets per grading and one matrix per consecutive pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearDiagram {
    /// gens[i] generates F(i), gradings 0..=n
    pub gens: Vec<Vec<Gen>>,
    /// maps[i]: F(i+1) → F(i)
    pub maps: Vec<IntMat>,
}

impl LinearDiagram {
    pub fn top_grading(&self) -> usize {
        self.gens.len() - 1
    }

    pub fn validate(&self) -> Result<(), CubeError> {
        assert_eq!(self.maps.len() + 1, self.gens.len());
        for (i, m) in self.maps.iter().enumerate() {
            if m.rows != self.gens[i].len() || m.cols != self.gens[i + 1].len() {
                return Err(CubeError::ShapeMismatch { at: format!("F({} -> {})", i + 1, i) });
            }
        }
        for i in 0..self.maps.len().saturating_sub(1) {
            if !self.maps[i].mul(&self.maps[i + 1]).is_zero() {
                return Err(CubeError::NotAComplex(i + 2));
            }
        }
        Ok(())
    }
}

/// A cubical diagram: generator sets per vertex of `{0,1}ⁿ` and integer
/// matrices on edges. Longer morphisms are determined by commutativity
/// and never stored. Missing edges act as the zero map, which is the
/// unique map into or out of an empty vertex.
#[derive(Clone, Debug)]
pub struct CubeDiagram {
    pub n: usize,
    /// indexed by vertex bits
    pub gens: Vec<Vec<Gen>>,
    edges: BTreeMap<(Vertex, usize), IntMat>,
}

impl CubeDiagram {
    pub fn new(n: usize, gens: Vec<Vec<Gen>>) -> Self {
        assert!(n < 31, "cube dimension too large");
        assert_eq!(gens.len(), 1usize << n);
        CubeDiagram { n, gens, edges: BTreeMap::new() }
    }

    /// Installs the matrix `G(u → u − ê_k)`; bit `k` of `u` must be set.
    pub fn set_edge(&mut self, u: Vertex, k: usize, m: IntMat) {
        assert!(u & (1 << k) != 0, "edge key must have bit k set");
        let v = u ^ (1 << k);
        assert_eq!(m.cols, self.gens[u as usize].len(), "edge source mismatch");
        assert_eq!(m.rows, self.gens[v as usize].len(), "edge target mismatch");
        if !m.is_zero() {
            self.edges.insert((u, k), m);
        }
    }

    /// The matrix of `G(u → u − ê_k)` (zero if absent).
    pub fn edge(&self, u: Vertex, k: usize) -> IntMat {
        let v = u ^ (1 << k);
        self.edges
            .get(&(u, k))
            .cloned()
            .unwrap_or_else(|| IntMat::zero(self.gens[v as usize].len(), self.gens[u as usize].len()))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..(1u32 << self.n)
    }

    /// Verifies that every 2-face commutes without signs; returns the
    /// first failing face otherwise.
    pub fn check_squares(&self) -> Result<(), CubeError> {
        for u in self.vertices() {
            for k in 0..self.n {
                if u & (1 << k) == 0 {
                    continue;
                }
                for l in (k + 1)..self.n {
                    if u & (1 << l) == 0 {
                        continue;
                    }
                    let via_k = self.edge(u ^ (1 << k), l).mul(&self.edge(u, k));
                    let via_l = self.edge(u ^ (1 << l), k).mul(&self.edge(u, l));
                    if via_k != via_l {
                        return Err(CubeError::NonCommutingSquare { u, k, l });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Places a linear diagram on the diagonal of the cube: `G(v) = F(i)`
/// for `v = (0,…,0,1,…,1)` with `i` ones, empty elsewhere.
pub fn alpha(f: &LinearDiagram) -> CubeDiagram {
    let n = f.top_grading();
    let diag = |i: usize| -> Vertex {
        if i == 0 {
            0
        } else {
            (((1u64 << i) - 1) as u32) << (n - i)
        }
    };
    let mut gens = vec![Vec::new(); 1usize << n];
    for i in 0..=n {
        gens[diag(i) as usize] = f.gens[i].clone();
    }
    let mut cube = CubeDiagram::new(n, gens);
    for i in 0..n {
        // diag(i+1) → diag(i) flips coordinate n − i (1-based), and all
        // earlier coordinates of diag(i+1) vanish, so the edge sign is +1
        let u = diag(i + 1);
        let k = (n - i - 1) as usize;
        cube.set_edge(u, k, f.maps[i].clone());
    }
    cube
}

/// Collapses a cube to a linear diagram: `F(i) = ⊔_{|v|=i} G(v)` with
/// signed edge blocks. Fails on a non-commuting square.
pub fn beta(g: &CubeDiagram) -> Result<LinearDiagram, CubeError> {
    g.check_squares()?;
    let n = g.n;
    // vertex order inside each grading: ascending bit value
    let mut by_weight: Vec<Vec<Vertex>> = vec![Vec::new(); n + 1];
    for v in g.vertices() {
        by_weight[v.count_ones() as usize].push(v);
    }
    let mut offsets: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut gens: Vec<Vec<Gen>> = Vec::with_capacity(n + 1);
    for vs in &by_weight {
        let mut level = Vec::new();
        for &v in vs {
            offsets.insert(v, level.len());
            level.extend_from_slice(&g.gens[v as usize]);
        }
        gens.push(level);
    }
    let mut maps = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = IntMat::zero(gens[i].len(), gens[i + 1].len());
        for &u in &by_weight[i + 1] {
            for k in 0..n {
                if u & (1 << k) == 0 {
                    continue;
                }
                let v = u ^ (1 << k);
                let block = g.edge(u, k);
                if block.is_zero() {
                    continue;
                }
                let sign = edge_sign(u, v).expect("u, v differ in bit k");
                m.insert_block(offsets[&v], offsets[&u], &block, sign);
            }
        }
        maps.push(m);
    }
    let f = LinearDiagram { gens, maps };
    f.validate()?;
    Ok(f)
}

/// A chain complex with a distinguished basis, `∂: C_{i+1} → C_i`,
/// validated to satisfy `∂² = 0` on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub gens: Vec<Vec<Gen>>,
    pub d: Vec<IntMat>,
}

impl ChainComplex {
    pub fn new(gens: Vec<Vec<Gen>>, d: Vec<IntMat>) -> Result<Self, CubeError> {
        let f = LinearDiagram { gens, maps: d };
        f.validate()?;
        Ok(ChainComplex { gens: f.gens, d: f.maps })
    }

    pub fn total_rank(&self) -> usize {
        self.gens.iter().map(|g| g.len()).sum()
    }
}

/// Totalization `Tot = ch ∘ β`.
pub fn totalize(g: &CubeDiagram) -> Result<ChainComplex, CubeError> {
    let f = beta(g)?;
    ChainComplex::new(f.gens, f.maps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_sign_examples() {
        // u=(1,0) → v=(0,0): k=1, empty sum
        assert_eq!(edge_sign(0b01, 0b00).unwrap(), 1);
        // u=(1,1) → v=(1,0): k=2, sum = u_1 = 1
        assert_eq!(edge_sign(0b11, 0b01).unwrap(), -1);
        // u=(1,0,1) → v=(1,0,0): k=3, sum = 1
        assert_eq!(edge_sign(0b101, 0b001).unwrap(), -1);
        assert!(matches!(edge_sign(0b01, 0b01), Err(CubeError::NotAnEdge { .. })));
        assert!(matches!(edge_sign(0b00, 0b01), Err(CubeError::NotAnEdge { .. })));
        assert!(matches!(edge_sign(0b11, 0b00), Err(CubeError::NotAnEdge { .. })));
    }

    fn two_step(m: i64) -> LinearDiagram {
        LinearDiagram {
            gens: vec![vec![0], vec![1]],
            maps: vec![IntMat::from_dense(&[vec![m]])],
        }
    }

    #[test]
    fn alpha_n1_transcription() {
        let f = two_step(2);
        let g = alpha(&f);
        assert_eq!(g.n, 1);
        assert_eq!(g.gens[0].len(), 1);
        assert_eq!(g.gens[1].len(), 1);
        assert_eq!(g.edge(1, 0).get(0, 0), 2);
    }

    #[test]
    fn alpha_one_grading_cube_is_silent() {
        // F supported in one grading, n = 2: one nonempty vertex, no maps
        let f = LinearDiagram {
            gens: vec![Vec::new(), vec![7, 8], Vec::new()],
            maps: vec![IntMat::zero(0, 2), IntMat::zero(2, 0)],
        };
        let g = alpha(&f);
        assert_eq!(g.n, 2);
        let nonempty: Vec<Vertex> = g.vertices().filter(|&v| !g.gens[v as usize].is_empty()).collect();
        assert_eq!(nonempty, vec![0b10]);
        for u in g.vertices() {
            for k in 0..2 {
                if u & (1 << k) != 0 {
                    assert!(g.edge(u, k).is_zero());
                }
            }
        }
    }

    #[test]
    fn beta_single_edge() {
        let f = two_step(5);
        let b = beta(&alpha(&f)).unwrap();
        assert_eq!(b, f);
    }

    #[test]
    fn beta_signs_cancel_on_unit_square() {
        // n=2 commuting square with all maps [1]: the middle differential
        // composes to 1 − 1 = 0
        let gens = vec![vec![0], vec![1], vec![2], vec![3]];
        let mut g = CubeDiagram::new(2, gens);
        let one = || IntMat::from_dense(&[vec![1]]);
        g.set_edge(0b11, 0, one());
        g.set_edge(0b11, 1, one());
        g.set_edge(0b01, 0, one());
        g.set_edge(0b10, 1, one());
        let f = beta(&g).unwrap();
        assert_eq!(f.gens[1].len(), 2);
        assert!(f.maps[0].mul(&f.maps[1]).is_zero());
        // the two blocks of the top differential carry opposite signs
        let m = &f.maps[1];
        let (a, b) = (m.get(0, 0), m.get(1, 0));
        assert_eq!(a * b, -1);
    }

    #[test]
    fn beta_rejects_noncommuting_square() {
        let gens = vec![vec![0], vec![1], vec![2], vec![3]];
        let mut g = CubeDiagram::new(2, gens);
        let c = |v: i64| IntMat::from_dense(&[vec![v]]);
        g.set_edge(0b11, 0, c(1));
        g.set_edge(0b11, 1, c(1));
        g.set_edge(0b01, 0, c(1));
        g.set_edge(0b10, 1, c(2));
        assert!(matches!(beta(&g), Err(CubeError::NonCommutingSquare { u: 0b11, k: 0, l: 1 })));
    }

    #[test]
    fn totalize_empty_cube() {
        let g = CubeDiagram::new(2, vec![Vec::new(); 4]);
        let c = totalize(&g).unwrap();
        assert_eq!(c.total_rank(), 0);
    }
}
