//! The Khovanov cube of a link diagram, its lift to the Burnside
//! category, and the bigraded integer complex.
//!
//! Labels follow the convention with `x₋` the unit of the Frobenius
//! algebra and the cube maps running from the 1-resolution to the
//! 0-resolution. The complex is the dual of the totalization (all
//! differentials transposed) with homological grading `|v| − n₋` and
//! quantum grading `(‖x‖₊ − ‖x‖₋) + |v| + n₊ − 2n₋`, calibrated so the
//! unknot sits at `(0, ±1)` and the graded Euler characteristic equals
//! the Kauffman state sum.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::burnside::{
    verify_coherence, BurnsideCube, BurnsideError, CompElem, Elem, SetMatrix, SquarePairing,
    TwoIso,
};
use crate::cube::{totalize, CubeDiagram, CubeError};
use crate::diagram::{
    resolve, saddle_between, Arc, DiagramError, LinkDiagram, Resolution, SaddleDescriptor,
    SaddleKind,
};
use crate::intmat::IntMat;
use crate::Vertex;

#[derive(Debug, Error)]
pub enum KhovanovError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Burnside(#[from] BurnsideError),
    #[error("not a ladybug square: {0}")]
    NotALadybug(String),
    #[error("coherence failure in constructed Burnside cube: {0}")]
    CoherenceFailure(String),
    #[error("arc {0} not found in diagram")]
    ArcNotFound(Arc),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// An assignment of `x₊`/`x₋` to the circles of a resolution: bit `c`
/// of `mask` is set when circle `c` carries `x₊`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Labeling {
    pub vertex: Vertex,
    pub mask: u64,
}

impl Labeling {
    pub fn plus_count(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn minus_count(&self, circles: usize) -> u32 {
        circles as u32 - self.mask.count_ones()
    }

    /// `j = (‖x‖₊ − ‖x‖₋) + |v| + n₊ − 2n₋`
    pub fn quantum_degree(&self, circles: usize, n_plus: usize, n_minus: usize) -> i32 {
        let p = self.plus_count() as i32;
        let m = self.minus_count(circles) as i32;
        (p - m) + self.vertex.count_ones() as i32 + n_plus as i32 - 2 * n_minus as i32
    }
}

/// The matrix entry of the TQFT on a connected genus-`g` cobordism
/// piece, given the `x₊`-count of the source restriction and the
/// `x₋`-count of the target restriction.
pub fn tqft_entry(genus: u32, x_plus: u32, y_minus: u32) -> u8 {
    match genus {
        0 if x_plus + y_minus == 1 => 1,
        1 if x_plus == 0 && y_minus == 0 => 2,
        _ => 0,
    }
}

/// Resolves every cube vertex of the diagram, in parallel.
pub fn all_resolutions(d: &LinkDiagram) -> Result<Vec<Resolution>, DiagramError> {
    let n = d.num_crossings();
    (0u32..(1u32 << n))
        .into_par_iter()
        .map(|v| resolve(d, v))
        .collect()
}

/// Target labelings of a saddle applied to source labeling `x`. Single
/// saddles are one genus-0 piece plus product annuli, so by
/// [`tqft_entry`] every matrix entry is 0 or 1: annuli transport labels
/// identically, a merge keeps the label sum, a split of `x₋` takes both
/// mixed labelings.
fn saddle_targets(sd: &SaddleDescriptor, x: u64) -> Vec<u64> {
    let mut base = 0u64;
    for &(src, tgt) in &sd.unaffected {
        if x >> src & 1 == 1 {
            base |= 1 << tgt;
        }
    }
    match sd.kind {
        SaddleKind::Merge => {
            let (a, b) = (sd.sources[0], sd.sources[1]);
            let t = sd.targets[0];
            match (x >> a & 1, x >> b & 1) {
                (1, 1) => vec![],
                (0, 0) => vec![base],
                _ => vec![base | 1 << t],
            }
        }
        SaddleKind::Split => {
            let s = sd.sources[0];
            let (t1, t2) = (sd.targets[0], sd.targets[1]);
            if x >> s & 1 == 1 {
                vec![base | 1 << t1 | 1 << t2]
            } else {
                vec![base | 1 << t1, base | 1 << t2]
            }
        }
    }
}

fn gen_id(v: Vertex, mask: u64) -> u64 {
    ((v as u64) << 32) | mask
}

/// The Khovanov cube `G_Kh = V ∘ 𝓛` over the integers: vertex sets are
/// all labelings of `𝓛(v)`, edge matrices the tensor over components of
/// [`tqft_entry`] applied to the saddle.
pub fn build_khovanov_cube(d: &LinkDiagram) -> Result<CubeDiagram, KhovanovError> {
    let res = all_resolutions(d)?;
    build_khovanov_cube_from(d, &res)
}

pub(crate) fn build_khovanov_cube_from(
    d: &LinkDiagram,
    res: &[Resolution],
) -> Result<CubeDiagram, KhovanovError> {
    let n = d.num_crossings();
    let gens: Vec<Vec<u64>> = (0..1usize << n)
        .map(|v| (0..1u64 << res[v].num_circles()).map(|m| gen_id(v as Vertex, m)).collect())
        .collect();
    let mut cube = CubeDiagram::new(n, gens);
    let edges: Vec<(Vertex, usize, IntMat)> = edge_keys(n)
        .into_par_iter()
        .map(|(u, k)| {
            let v = u ^ (1 << k);
            let sd = saddle_between(d, &res[u as usize], &res[v as usize])?;
            let mut m = IntMat::zero(
                1 << res[v as usize].num_circles(),
                1 << res[u as usize].num_circles(),
            );
            for x in 0..1u64 << res[u as usize].num_circles() {
                for y in saddle_targets(&sd, x) {
                    m.set(y as usize, x as usize, 1);
                }
            }
            Ok((u, k, m))
        })
        .collect::<Result<_, KhovanovError>>()?;
    for (u, k, m) in edges {
        cube.set_edge(u, k, m);
    }
    Ok(cube)
}

fn edge_keys(n: usize) -> Vec<(Vertex, usize)> {
    let mut keys = Vec::new();
    for u in 0..(1u32 << n) {
        for k in 0..n {
            if u & (1 << k) != 0 {
                keys.push((u, k));
            }
        }
    }
    keys
}

// ---------------------------------------------------------------------------
// the ladybug rule

/// One of the four saddle feet on the circle that a ladybug square
/// splits and re-merges, in traversal order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LadybugPoint {
    pub crossing: usize,
    pub strand: u8,
    /// resolution site on the left of the traversal direction
    pub on_left: bool,
}

/// The four marked points of a ladybug configuration in cyclic order.
/// The two feet of each site carry equal side flags and the two sites
/// carry opposite flags; both facts are forced by planarity.
#[derive(Clone, Debug)]
pub struct LadybugConfig {
    pub points: [LadybugPoint; 4],
}

impl LadybugConfig {
    pub fn new(points: [LadybugPoint; 4]) -> Result<Self, KhovanovError> {
        let sites: Vec<usize> = points.iter().map(|p| p.crossing).collect();
        if sites[0] != sites[2] || sites[1] != sites[3] || sites[0] == sites[1] {
            return Err(KhovanovError::NotALadybug(
                "marked points of the two sites do not alternate".into(),
            ));
        }
        if points[0].on_left != points[2].on_left
            || points[1].on_left != points[3].on_left
            || points[0].on_left == points[1].on_left
        {
            return Err(KhovanovError::NotALadybug(
                "side flags are not planar (same-site flags must agree, cross-site differ)".into(),
            ));
        }
        Ok(LadybugConfig { points })
    }

    /// The same configuration traversed the other way.
    pub fn reversed(&self) -> LadybugConfig {
        let p = &self.points;
        let flip = |q: &LadybugPoint| LadybugPoint { on_left: !q.on_left, ..*q };
        LadybugConfig { points: [flip(&p[0]), flip(&p[3]), flip(&p[2]), flip(&p[1])] }
    }
}

/// A choice of bijection for ladybug squares. Rules pair cyclically
/// consecutive marked points of opposite sites; the pair `(i, j)` means
/// the matching identifies the split circle containing point `i` with
/// the split circle containing point `j`.
pub trait LadybugRule: Send + Sync {
    fn name(&self) -> &'static str;
    fn match_points(&self, config: &LadybugConfig) -> [(usize, usize); 2];
}

/// Pairs each transition that steps off the right of one band onto the
/// left of the other: consecutive points `(i, i+1)` with `i` flagged
/// right and `i+1` flagged left.
pub struct RightPair;

impl LadybugRule for RightPair {
    fn name(&self) -> &'static str {
        "right-pair"
    }

    fn match_points(&self, config: &LadybugConfig) -> [(usize, usize); 2] {
        let mut out = Vec::with_capacity(2);
        for i in 0..4 {
            let j = (i + 1) % 4;
            if !config.points[i].on_left && config.points[j].on_left {
                out.push((i, j));
            }
        }
        out.try_into().expect("alternating flags give exactly two right-left transitions")
    }
}

/// The opposite convention: left-to-right transitions.
pub struct LeftPair;

impl LadybugRule for LeftPair {
    fn name(&self) -> &'static str {
        "left-pair"
    }

    fn match_points(&self, config: &LadybugConfig) -> [(usize, usize); 2] {
        let mut out = Vec::with_capacity(2);
        for i in 0..4 {
            let j = (i + 1) % 4;
            if config.points[i].on_left && !config.points[j].on_left {
                out.push((i, j));
            }
        }
        out.try_into().expect("alternating flags give exactly two left-right transitions")
    }
}

pub const DEFAULT_LADYBUG_RULE: &str = "right-pair";

/// The registered ladybug rules, selectable by name.
pub fn ladybug_rules() -> &'static [&'static dyn LadybugRule] {
    static RULES: [&dyn LadybugRule; 2] = [&RightPair, &LeftPair];
    &RULES
}

pub fn ladybug_rule(name: &str) -> Option<&'static dyn LadybugRule> {
    ladybug_rules().iter().copied().find(|r| r.name() == name)
}

// ---------------------------------------------------------------------------
// the Burnside lift

/// Detects whether face `(u; k, l)` is a ladybug square: one circle of
/// `𝓛(u)` carries both feet of both sites, interleaved. Returns the
/// positions of the four feet in the circle's cyclic visit order.
fn detect_ladybug(ru: &Resolution, k: usize, l: usize) -> Option<[usize; 4]> {
    let zk0 = ru.strand_location(k, 0);
    let zk1 = ru.strand_location(k, 1);
    let zl0 = ru.strand_location(l, 0);
    let zl1 = ru.strand_location(l, 1);
    if zk0.0 != zk1.0 || zl0.0 != zl1.0 || zk0.0 != zl0.0 {
        return None;
    }
    let mut pos = [zk0.1, zk1.1, zl0.1, zl1.1];
    pos.sort_unstable();
    let circle = &ru.circles[zk0.0];
    let site = |p: usize| circle.visits[p].crossing;
    if site(pos[0]) != site(pos[2]) || site(pos[1]) != site(pos[3]) || site(pos[0]) == site(pos[1]) {
        return None; // both sites on one circle but not interleaved
    }
    Some(pos)
}

/// The circle-level ladybug matching for the square `(u; k, l)`,
/// returning pairs (split circle at `u−ê_k`, split circle at `u−ê_l`).
fn ladybug_circle_matching(
    ru: &Resolution,
    rvk: &Resolution,
    rvl: &Resolution,
    k: usize,
    l: usize,
    rule: &dyn LadybugRule,
) -> Result<[(usize, usize); 2], KhovanovError> {
    let pos = detect_ladybug(ru, k, l).ok_or_else(|| {
        KhovanovError::NotALadybug("face does not split and re-merge one circle".into())
    })?;
    let circle = &ru.circles[ru.strand_location(k, 0).0];
    let mk_point = |p: usize| {
        let v = circle.visits[p];
        LadybugPoint { crossing: v.crossing, strand: v.strand(), on_left: v.site_on_left() }
    };
    let config =
        LadybugConfig::new([mk_point(pos[0]), mk_point(pos[1]), mk_point(pos[2]), mk_point(pos[3])])?;
    let pairs = rule.match_points(&config);
    let mut out = [(0usize, 0usize); 2];
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        let (pi, pj) = (config.points[i], config.points[j]);
        let (pk, pl) = if pi.crossing == k { (pi, pj) } else { (pj, pi) };
        debug_assert_eq!(pl.crossing, l);
        // the piece containing a site-k foot appears after the l-surgery,
        // and vice versa
        let at_vk = rvk.circle_of_strand(l, pl.strand);
        let at_vl = rvl.circle_of_strand(k, pk.strand);
        out[idx] = (at_vk, at_vl);
    }
    if out[0].0 == out[1].0 || out[0].1 == out[1].1 {
        return Err(KhovanovError::NotALadybug(
            "matching is not a bijection of split circles".into(),
        ));
    }
    Ok(out)
}

/// Matches circles of two resolutions by minimal arc, excluding the
/// given indices on each side.
fn circle_correspondence(
    ra: &Resolution,
    rb: &Resolution,
    skip_a: &[usize],
    skip_b: &[usize],
) -> Vec<(usize, usize)> {
    let mut by_min: BTreeMap<Arc, usize> = BTreeMap::new();
    for (i, c) in rb.circles.iter().enumerate() {
        if !skip_b.contains(&i) {
            by_min.insert(c.min_arc(), i);
        }
    }
    let mut out = Vec::new();
    for (i, c) in ra.circles.iter().enumerate() {
        if !skip_a.contains(&i) {
            out.push((i, by_min[&c.min_arc()]));
        }
    }
    out
}

/// Builds the square pairing for a ladybug face: for every source
/// labeling with `x₋` on the split circle, the two composite elements
/// on each route are matched according to the rule's circle matching.
fn ladybug_pairing(
    d: &LinkDiagram,
    res: &[Resolution],
    u: Vertex,
    k: usize,
    l: usize,
    rule: &dyn LadybugRule,
) -> Result<SquarePairing, KhovanovError> {
    let ru = &res[u as usize];
    let vk = u ^ (1 << k);
    let vl = u ^ (1 << l);
    let w = vk ^ (1 << l);
    let (rvk, rvl, rw) = (&res[vk as usize], &res[vl as usize], &res[w as usize]);

    let matching = ladybug_circle_matching(ru, rvk, rvl, k, l, rule)?;
    let z = ru.strand_location(k, 0).0;
    let sd_k = saddle_between(d, ru, rvk)?;
    let sd_l = saddle_between(d, ru, rvl)?;
    debug_assert_eq!(sd_k.kind, SaddleKind::Split);
    debug_assert_eq!(sd_l.kind, SaddleKind::Split);
    // the re-merged circle at w inherits the minimal arc of z
    let zw = rw
        .circles
        .iter()
        .position(|c| c.min_arc() == ru.circles[z].min_arc())
        .ok_or_else(|| KhovanovError::Internal("re-merged circle not found".into()))?;
    let u_to_w = circle_correspondence(ru, rw, &[z], &[zw]);

    let transport = |x: u64, map: &[(usize, usize)]| -> u64 {
        let mut y = 0u64;
        for &(a, b) in map {
            if x >> a & 1 == 1 {
                y |= 1 << b;
            }
        }
        y
    };

    let mut pairing = SquarePairing::default();
    for x in 0..1u64 << ru.num_circles() {
        if x >> z & 1 == 1 {
            continue;
        }
        let y = transport(x, &u_to_w) | 1 << zw;
        let mid_k_base = transport(x, &sd_k.unaffected);
        let mid_l_base = transport(x, &sd_l.unaffected);
        let mut pairs = Vec::with_capacity(2);
        for &(piece_k, piece_l) in &matching {
            let mid_k = mid_k_base | 1 << piece_k;
            let mid_l = mid_l_base | 1 << piece_l;
            pairs.push((
                CompElem { mid: mid_k as u32, first: Elem::Pt(k as u32), second: Elem::Pt(l as u32) },
                CompElem { mid: mid_l as u32, first: Elem::Pt(l as u32), second: Elem::Pt(k as u32) },
            ));
        }
        pairs.sort();
        pairing.entries.insert((y as u32, x as u32), pairs);
    }
    Ok(pairing)
}

/// The 2-isomorphism of the square `(u; k, l)` as an explicit `TwoIso`
/// between the two route composites, with the two-element entries
/// matched by the given rule. Errors with `NotALadybug` when no entry
/// is a two-element set.
pub fn ladybug_matching(
    d: &LinkDiagram,
    u: Vertex,
    k: usize,
    l: usize,
    rule: &dyn LadybugRule,
) -> Result<TwoIso, KhovanovError> {
    let res = all_resolutions(d)?;
    let (k, l) = (k.min(l), k.max(l));
    if detect_ladybug(&res[u as usize], k, l).is_none() {
        return Err(KhovanovError::NotALadybug(
            "composite entries are not two-element sets".into(),
        ));
    }
    let cube = build_burnside_cube_with(d, &res, rule, false)?;
    Ok(cube.square_iso(u, k, l)?)
}

/// Lifts the Khovanov cube to the Burnside category with the given
/// ladybug rule and certifies coherence on every 3-face.
pub fn build_burnside_cube(
    d: &LinkDiagram,
    rule: &dyn LadybugRule,
) -> Result<BurnsideCube, KhovanovError> {
    let res = all_resolutions(d)?;
    build_burnside_cube_with(d, &res, rule, true)
}

pub(crate) fn build_burnside_cube_with(
    d: &LinkDiagram,
    res: &[Resolution],
    rule: &dyn LadybugRule,
    certify: bool,
) -> Result<BurnsideCube, KhovanovError> {
    let n = d.num_crossings();
    let gens: Vec<usize> = (0..1usize << n).map(|v| 1usize << res[v].num_circles()).collect();
    let mut cube = BurnsideCube::new(n, gens);

    let edges: Vec<(Vertex, usize, SetMatrix)> = edge_keys(n)
        .into_par_iter()
        .map(|(u, k)| {
            let v = u ^ (1 << k);
            let sd = saddle_between(d, &res[u as usize], &res[v as usize])?;
            let mut m = SetMatrix::new(
                1 << res[v as usize].num_circles(),
                1 << res[u as usize].num_circles(),
            );
            for x in 0..1u64 << res[u as usize].num_circles() {
                for y in saddle_targets(&sd, x) {
                    m.insert(y as u32, x as u32, Elem::Pt(k as u32));
                }
            }
            Ok((u, k, m))
        })
        .collect::<Result<_, KhovanovError>>()?;
    for (u, k, m) in edges {
        cube.set_edge(u, k, m);
    }

    // square pairings, needed exactly on the ladybug faces
    let mut faces = Vec::new();
    for u in 0..(1u32 << n) {
        for k in 0..n {
            if u & (1 << k) == 0 {
                continue;
            }
            for l in (k + 1)..n {
                if u & (1 << l) != 0 && detect_ladybug(&res[u as usize], k, l).is_some() {
                    faces.push((u, k, l));
                }
            }
        }
    }
    let pairings: Vec<(Vertex, usize, usize, SquarePairing)> = faces
        .into_par_iter()
        .map(|(u, k, l)| Ok((u, k, l, ladybug_pairing(d, res, u, k, l, rule)?)))
        .collect::<Result<_, KhovanovError>>()?;
    for (u, k, l, p) in pairings {
        cube.set_square(u, k, l, p);
    }

    if certify {
        let report = verify_coherence(&cube)?;
        if let Some(f) = report.failure {
            return Err(KhovanovError::CoherenceFailure(format!(
                "3-face at u = {:#b}, dirs {:?}: {}",
                f.u, f.dirs, f.detail
            )));
        }
    }
    Ok(cube)
}

// ---------------------------------------------------------------------------
// the bigraded complex

/// The Khovanov complex: generators indexed by bidegree `(i, j)`, with
/// one differential block per bidegree mapping `(i, j) → (i+1, j)`.
#[derive(Clone, Debug)]
pub struct BigradedComplex {
    pub gens: BTreeMap<(i32, i32), Vec<Labeling>>,
    pub d: BTreeMap<(i32, i32), IntMat>,
}

impl BigradedComplex {
    pub fn dim(&self, i: i32, j: i32) -> usize {
        self.gens.get(&(i, j)).map_or(0, |g| g.len())
    }

    pub fn bidegrees(&self) -> Vec<(i32, i32)> {
        self.gens.keys().copied().collect()
    }

    pub fn differential(&self, i: i32, j: i32) -> IntMat {
        self.d
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| IntMat::zero(self.dim(i + 1, j), self.dim(i, j)))
    }

    pub fn total_dim(&self) -> usize {
        self.gens.values().map(|g| g.len()).sum()
    }

    /// `∂² = 0`, blockwise.
    pub fn validate(&self) -> Result<(), KhovanovError> {
        for &(i, j) in self.d.keys() {
            let a = self.differential(i, j);
            let b = self.differential(i + 1, j);
            if !b.mul(&a).is_zero() {
                return Err(KhovanovError::Internal(format!("d^2 != 0 at bidegree ({i}, {j})")));
            }
        }
        Ok(())
    }
}

/// `Dual(Tot(G_Kh))[n₋]` with quantum degrees attached: transpose all
/// differentials of the totalization, shift the homological grading by
/// `n₋`, and split by the quantum grading, which every differential
/// preserves.
pub fn khovanov_complex(d: &LinkDiagram) -> Result<BigradedComplex, KhovanovError> {
    let res = all_resolutions(d)?;
    let cube = build_khovanov_cube_from(d, &res)?;
    complex_from_cube(d, &res, &cube, None)
}

/// The reduced complex: the subcomplex of labelings carrying `x₋` on
/// the circle through the basepoint arc, with quantum grading shifted
/// by +1 so the reduced unknot sits at `(0, 0)`.
pub fn reduced_complex(d: &LinkDiagram, basepoint: Arc) -> Result<BigradedComplex, KhovanovError> {
    if !d.has_arc(basepoint) {
        return Err(KhovanovError::ArcNotFound(basepoint));
    }
    let res = all_resolutions(d)?;
    let cube = build_khovanov_cube_from(d, &res)?;
    complex_from_cube(d, &res, &cube, Some(basepoint))
}

pub(crate) fn complex_from_cube(
    d: &LinkDiagram,
    res: &[Resolution],
    cube: &CubeDiagram,
    basepoint: Option<Arc>,
) -> Result<BigradedComplex, KhovanovError> {
    let tot = totalize(cube)?;
    let n_minus = d.n_minus() as i32;
    let j_shift = if basepoint.is_some() { 1 } else { 0 };

    // a generator survives reduction when its based circle carries x₋
    let keep = |v: Vertex, mask: u64| -> bool {
        match basepoint {
            None => true,
            Some(arc) => {
                let c = res[v as usize]
                    .circle_of_arc(arc)
                    .expect("basepoint arc appears in every resolution");
                mask >> c & 1 == 0
            }
        }
    };

    let decode =
        |g: u64| -> Labeling { Labeling { vertex: (g >> 32) as Vertex, mask: g & 0xffff_ffff } };
    let bidegree = |lab: &Labeling| -> (i32, i32) {
        let circles = res[lab.vertex as usize].num_circles();
        let i = lab.vertex.count_ones() as i32 - n_minus;
        let j = lab.quantum_degree(circles, d.n_plus(), d.n_minus()) + j_shift;
        (i, j)
    };

    let mut gens: BTreeMap<(i32, i32), Vec<Labeling>> = BTreeMap::new();
    // position of each kept generator within its (i, j) block, indexed by
    // homological level then position in the totalization's basis order
    let mut index: Vec<Vec<Option<((i32, i32), usize)>>> = Vec::with_capacity(tot.gens.len());
    for level in &tot.gens {
        let mut level_index = Vec::with_capacity(level.len());
        for &g in level {
            let lab = decode(g);
            if keep(lab.vertex, lab.mask) {
                let key = bidegree(&lab);
                let block = gens.entry(key).or_default();
                block.push(lab);
                level_index.push(Some((key, block.len() - 1)));
            } else {
                level_index.push(None);
            }
        }
        index.push(level_index);
    }

    let mut dmats: BTreeMap<(i32, i32), IntMat> = BTreeMap::new();
    for (level, m) in tot.d.iter().enumerate() {
        // tot.d[level]: C_{level+1} → C_level; the dual differential runs
        // the other way with the transposed matrix
        for (r, c, val) in m.iter() {
            let (src, tgt) = match (&index[level][r], &index[level + 1][c]) {
                (Some(src), Some(tgt)) => (src, tgt),
                _ => continue,
            };
            let ((i, j), col) = *src;
            let ((i2, j2), row) = *tgt;
            if i2 != i + 1 || j2 != j {
                return Err(KhovanovError::Internal(format!(
                    "differential entry does not preserve quantum degree: ({i},{j}) -> ({i2},{j2})"
                )));
            }
            let rows = gens.get(&(i + 1, j)).map_or(0, |g| g.len());
            let cols = gens[&(i, j)].len();
            dmats
                .entry((i, j))
                .or_insert_with(|| IntMat::zero(rows, cols))
                .add(row, col, val);
        }
    }

    let complex = BigradedComplex { gens, d: dmats };
    complex.validate()?;
    Ok(complex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    #[test]
    fn tqft_entry_table() {
        // genus 0: merge of (x₋, x₋) onto x₋ has ‖x‖₊ + ‖y‖₋ = 1
        assert_eq!(tqft_entry(0, 0, 1), 1);
        // genus 1, all x₋ in, all x₊ out
        assert_eq!(tqft_entry(1, 0, 0), 2);
        // genus 0 with two x₊ sources and an x₊ target
        assert_eq!(tqft_entry(0, 2, 0), 0);
        assert_eq!(tqft_entry(0, 1, 1), 0);
        assert_eq!(tqft_entry(1, 1, 0), 0);
        assert_eq!(tqft_entry(2, 0, 0), 0);
    }

    #[test]
    fn unknot_cube_is_single_vertex() {
        let d = parse_pd("U").unwrap();
        let cube = build_khovanov_cube(&d).unwrap();
        assert_eq!(cube.n, 0);
        assert_eq!(cube.gens[0].len(), 2);
    }

    #[test]
    fn one_crossing_edge_matrix_is_the_merge() {
        // the negative kink merges two circles into one along its edge
        let d = parse_pd("X[1,2,2,1]").unwrap();
        let cube = build_khovanov_cube(&d).unwrap();
        let m = cube.edge(1, 0);
        // hand-assembled merge in mask order (bit = x₊):
        // (−,−)→(−), (+,−)→(+), (−,+)→(+), (+,+)→0
        let expect = IntMat::from_entries(2, 4, [(0, 0, 1), (1, 1, 1), (1, 2, 1)]);
        assert_eq!(m, expect);
    }

    #[test]
    fn trefoil_cube_squares_commute() {
        let d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        let cube = build_khovanov_cube(&d).unwrap();
        cube.check_squares().unwrap();
    }

    #[test]
    fn unknot_complex_gradings() {
        let d = parse_pd("U").unwrap();
        let c = khovanov_complex(&d).unwrap();
        assert_eq!(c.dim(0, 1), 1);
        assert_eq!(c.dim(0, -1), 1);
        assert_eq!(c.total_dim(), 2);
        assert!(c.d.is_empty());
    }

    #[test]
    fn trefoil_complex_is_a_complex() {
        let d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        let c = khovanov_complex(&d).unwrap();
        c.validate().unwrap();
        // all-negative trefoil: homological gradings −3..0
        for &(i, _) in &c.bidegrees() {
            assert!((-3..=0).contains(&i));
        }
    }

    #[test]
    fn reduced_unknot_is_one_generator() {
        let d = parse_pd("U").unwrap();
        let c = reduced_complex(&d, 0).unwrap();
        assert_eq!(c.total_dim(), 1);
        assert_eq!(c.dim(0, 0), 1);
    }

    #[test]
    fn reduced_missing_arc_errors() {
        let d = parse_pd("U").unwrap();
        assert!(matches!(reduced_complex(&d, 7), Err(KhovanovError::ArcNotFound(7))));
    }

    #[test]
    fn synthetic_ladybug_matching_and_reversal() {
        // circle with points p1 p2 p3 p4 in cyclic order, first saddle
        // joining {p1, p3}, second joining {p2, p4}
        let points = [
            LadybugPoint { crossing: 0, strand: 0, on_left: true },
            LadybugPoint { crossing: 1, strand: 0, on_left: false },
            LadybugPoint { crossing: 0, strand: 1, on_left: true },
            LadybugPoint { crossing: 1, strand: 1, on_left: false },
        ];
        let config = LadybugConfig::new(points).unwrap();
        let pairs = RightPair.match_points(&config);
        // transitions off the right flags: (p2 → p3) and (p4 → p1)
        assert_eq!(pairs, [(1, 2), (3, 0)]);

        // reversing the traversal leaves the matching unchanged as a
        // pairing of strands
        let rev = config.reversed();
        let rev_pairs = RightPair.match_points(&rev);
        let strand_pairs = |cfg: &LadybugConfig, prs: [(usize, usize); 2]| {
            let mut v: Vec<[(usize, u8); 2]> = prs
                .iter()
                .map(|&(i, j)| {
                    let mut pair = [
                        (cfg.points[i].crossing, cfg.points[i].strand),
                        (cfg.points[j].crossing, cfg.points[j].strand),
                    ];
                    pair.sort_unstable();
                    pair
                })
                .collect();
            v.sort_unstable();
            v
        };
        assert_eq!(strand_pairs(&config, pairs), strand_pairs(&rev, rev_pairs));
    }

    #[test]
    fn ladybug_config_rejects_non_alternating() {
        let points = [
            LadybugPoint { crossing: 0, strand: 0, on_left: true },
            LadybugPoint { crossing: 0, strand: 1, on_left: true },
            LadybugPoint { crossing: 1, strand: 0, on_left: false },
            LadybugPoint { crossing: 1, strand: 1, on_left: false },
        ];
        assert!(matches!(LadybugConfig::new(points), Err(KhovanovError::NotALadybug(_))));
    }

    #[test]
    fn rule_registry() {
        assert_eq!(ladybug_rule("right-pair").unwrap().name(), "right-pair");
        assert_eq!(ladybug_rule("left-pair").unwrap().name(), "left-pair");
        assert!(ladybug_rule("no-such-rule").is_none());
        assert!(ladybug_rule(DEFAULT_LADYBUG_RULE).is_some());
    }
}
