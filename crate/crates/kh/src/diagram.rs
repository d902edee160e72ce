//! Planar link diagrams: PD-code and braid-word ingestion, complete
//! resolutions, and saddle descriptors for cube edges.
//!
//! Conventions (fixed once, used everywhere downstream):
//!
//! * A crossing record `X[a,b,c,d]` lists the four incident arcs
//!   counterclockwise starting from the incoming under-strand. The
//!   under-strand runs `a → c`; the over-strand occupies `b` and `d`.
//! * The crossing is positive when the over-strand runs `d → b`,
//!   negative when it runs `b → d`.
//! * Resolving a crossing joins adjacent ports: the 0-resolution joins
//!   ports `{0,1}` and `{2,3}`, the 1-resolution joins `{0,3}` and
//!   `{1,2}`. Both smoothing strands connect ccw-adjacent ports, so a
//!   circle passing through a crossing exits one port ccw-adjacent to
//!   its entry; the resolution site sits on the circle's left exactly
//!   when `exit = entry + 1 (mod 4)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::Vertex;

pub type Arc = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("malformed syntax: {0}")]
    MalformedSyntax(String),
    #[error("inconsistent arcs: arc {0} does not appear exactly twice")]
    InconsistentArcs(Arc),
    #[error("no globally consistent orientation (conflict at arc {0})")]
    OrientationConflict(Arc),
    #[error("empty braid word without a strand count")]
    EmptyWordWithoutStrandCount,
    #[error("braid generator {generator} out of range for {strands} strands")]
    GeneratorOutOfRange { generator: i32, strands: usize },
    #[error("vertex length {got} does not match crossing count {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("u - v is not a unit vector (u = {u:#b}, v = {v:#b})")]
    NotAnEdge { u: Vertex, v: Vertex },
    #[error("arc {0} not found in diagram")]
    ArcNotFound(Arc),
    #[error("resolution change at crossing {0} is not a single merge or split; the diagram is not planar")]
    NonPlanar(usize),
}

/// One crossing: arcs counterclockwise from the incoming under-strand,
/// plus the sign derived from the global orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub arcs: [Arc; 4],
    pub sign: i8,
}

/// Where one end of an arc attaches: `(crossing index, port)`.
pub type ArcEnd = (usize, u8);

#[derive(Clone, Debug)]
struct ArcInfo {
    ends: [ArcEnd; 2],
    /// arc flows from `ends[0]` to `ends[1]` when true
    forward: bool,
}

#[derive(Clone, Debug)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    arcs: BTreeMap<Arc, ArcInfo>,
    /// crossingless circles, one arc id each
    free_loops: Vec<Arc>,
    components: usize,
    n_plus: usize,
    n_minus: usize,
}

impl LinkDiagram {
    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn num_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    pub fn writhe(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    pub fn free_loops(&self) -> &[Arc] {
        &self.free_loops
    }

    /// All arc identifiers, sorted.
    pub fn arc_ids(&self) -> Vec<Arc> {
        let mut v: Vec<Arc> = self.arcs.keys().copied().collect();
        v.extend_from_slice(&self.free_loops);
        v.sort_unstable();
        v
    }

    pub fn has_arc(&self, a: Arc) -> bool {
        self.arcs.contains_key(&a) || self.free_loops.contains(&a)
    }

    /// The two attachment points of an arc, in stored order.
    pub fn arc_ends(&self, a: Arc) -> Option<[ArcEnd; 2]> {
        self.arcs.get(&a).map(|i| i.ends)
    }

    /// True when the arc arrives at (flows into) the given end.
    pub fn is_head(&self, a: Arc, end: ArcEnd) -> bool {
        let info = &self.arcs[&a];
        let idx = if info.ends[0] == end { 0 } else { 1 };
        (idx == 1) == info.forward
    }

    /// Builds a diagram from raw crossing records, recomputing arc
    /// bookkeeping, orientations, signs and component count.
    ///
    /// `forced: (arc, forward)` pins the direction of specific arcs; the
    /// braid builder uses this to orient every strand downward. Components
    /// whose orientation is not determined by the under-strand convention
    /// get the `forward` direction on their smallest arc.
    pub fn from_crossings(
        raw: Vec<[Arc; 4]>,
        free_loops: Vec<Arc>,
        forced: &[(Arc, bool)],
    ) -> Result<LinkDiagram, DiagramError> {
        // collect arc endpoints
        let mut ends: BTreeMap<Arc, Vec<ArcEnd>> = BTreeMap::new();
        for (ci, x) in raw.iter().enumerate() {
            for (p, &a) in x.iter().enumerate() {
                ends.entry(a).or_default().push((ci, p as u8));
            }
        }
        for &l in &free_loops {
            if ends.contains_key(&l) {
                return Err(DiagramError::InconsistentArcs(l));
            }
        }
        let mut arcs: BTreeMap<Arc, ArcInfo> = BTreeMap::new();
        for (a, mut e) in ends {
            if e.len() != 2 {
                return Err(DiagramError::InconsistentArcs(a));
            }
            e.sort_unstable();
            arcs.insert(a, ArcInfo { ends: [e[0], e[1]], forward: true });
        }

        // Orientation constraints. dir[a] = true means the arc flows
        // ends[0] -> ends[1]. Port 0 endpoints are heads, port 2 tails;
        // at the over-ports 1 and 3 exactly one endpoint is a head.
        let mut dir: BTreeMap<Arc, Option<bool>> = arcs.keys().map(|&a| (a, None)).collect();

        // dir value making endpoint e of arc a a head (resp. tail); a kink
        // arc has both ends at one crossing, the sorted position tells them
        // apart
        fn dir_for(arcs: &BTreeMap<Arc, ArcInfo>, a: Arc, e: ArcEnd, head: bool) -> bool {
            let idx = if arcs[&a].ends[0] == e { 0 } else { 1 };
            (idx == 1) == head
        }

        fn assign(
            dir: &mut BTreeMap<Arc, Option<bool>>,
            a: Arc,
            val: bool,
        ) -> Result<bool, DiagramError> {
            match dir[&a] {
                None => {
                    dir.insert(a, Some(val));
                    Ok(true)
                }
                Some(v) if v == val => Ok(false),
                Some(_) => Err(DiagramError::OrientationConflict(a)),
            }
        }

        // over-port constraint: exactly one of ports 1, 3 is a head
        fn propagate(
            raw: &[[Arc; 4]],
            arcs: &BTreeMap<Arc, ArcInfo>,
            dir: &mut BTreeMap<Arc, Option<bool>>,
        ) -> Result<(), DiagramError> {
            loop {
                let mut changed = false;
                for (ci, x) in raw.iter().enumerate() {
                    let (b, d) = (x[1], x[3]);
                    let head_b = dir[&b].map(|v| v == dir_for(arcs, b, (ci, 1), true));
                    let head_d = dir[&d].map(|v| v == dir_for(arcs, d, (ci, 3), true));
                    match (head_b, head_d) {
                        (Some(hb), Some(hd)) => {
                            if hb == hd {
                                return Err(DiagramError::OrientationConflict(b));
                            }
                        }
                        (Some(hb), None) => {
                            changed |= assign(dir, d, dir_for(arcs, d, (ci, 3), !hb))?;
                        }
                        (None, Some(hd)) => {
                            changed |= assign(dir, b, dir_for(arcs, b, (ci, 1), !hd))?;
                        }
                        (None, None) => {}
                    }
                }
                if !changed {
                    return Ok(());
                }
            }
        }

        for &(a, f) in forced {
            if !arcs.contains_key(&a) {
                continue;
            }
            assign(&mut dir, a, f)?;
        }
        for (ci, x) in raw.iter().enumerate() {
            let (a0, a2) = (x[0], x[2]);
            assign(&mut dir, a0, dir_for(&arcs, a0, (ci, 0), true))?;
            assign(&mut dir, a2, dir_for(&arcs, a2, (ci, 2), false))?;
        }
        propagate(&raw, &arcs, &mut dir)?;
        // components never pinned by an under-pass: orient their smallest arc
        while let Some(a) = dir.iter().find(|(_, v)| v.is_none()).map(|(&a, _)| a) {
            assign(&mut dir, a, true)?;
            propagate(&raw, &arcs, &mut dir)?;
        }
        for (a, info) in arcs.iter_mut() {
            info.forward = dir[a].unwrap();
        }

        // crossing signs: positive when the over-strand runs d -> b
        let mut crossings = Vec::with_capacity(raw.len());
        let mut n_plus = 0;
        let mut n_minus = 0;
        for (ci, x) in raw.iter().enumerate() {
            let d = x[3];
            let info = &arcs[&d];
            let idx = if info.ends[0] == (ci, 3) { 0 } else { 1 };
            let head_d = (idx == 1) == info.forward;
            let sign = if head_d { 1i8 } else { -1i8 };
            if sign > 0 {
                n_plus += 1;
            } else {
                n_minus += 1;
            }
            crossings.push(Crossing { arcs: *x, sign });
        }

        // component count: follow oriented strands through crossings
        let mut seen: BTreeSet<Arc> = BTreeSet::new();
        let mut components = free_loops.len();
        let strand_exit = |p: u8| -> u8 {
            match p {
                0 => 2,
                2 => 0,
                1 => 3,
                _ => 1,
            }
        };
        let arcs_ref = &arcs;
        for &a0 in arcs.keys() {
            if seen.contains(&a0) {
                continue;
            }
            components += 1;
            let mut a = a0;
            loop {
                seen.insert(a);
                let info = &arcs_ref[&a];
                let head = if info.forward { info.ends[1] } else { info.ends[0] };
                let (ci, p) = head;
                let q = strand_exit(p);
                a = crossings[ci].arcs[q as usize];
                if a == a0 {
                    break;
                }
            }
        }

        Ok(LinkDiagram { crossings, arcs, free_loops, components, n_plus, n_minus })
    }

    /// Swaps over and under at every crossing; `n₊ ↔ n₋`.
    pub fn mirror(&self) -> LinkDiagram {
        let raw: Vec<[Arc; 4]> = self
            .crossings
            .iter()
            .map(|x| {
                let [a, b, c, d] = x.arcs;
                // the old over-strand becomes the under-strand; rotate the
                // tuple so position 0 is its incoming end
                if x.sign > 0 {
                    [d, a, b, c]
                } else {
                    [b, c, d, a]
                }
            })
            .collect();
        LinkDiagram::from_crossings(raw, self.free_loops.clone(), &[])
            .expect("mirror of a valid diagram is valid")
    }

    /// Disjoint union; arcs of `other` are relabeled above ours.
    pub fn disjoint_union(&self, other: &LinkDiagram) -> LinkDiagram {
        let offset = self.arc_ids().last().copied().map_or(0, |m| m + 1);
        let mut raw: Vec<[Arc; 4]> = self.crossings.iter().map(|x| x.arcs).collect();
        raw.extend(other.crossings.iter().map(|x| {
            let mut t = x.arcs;
            for a in t.iter_mut() {
                *a += offset;
            }
            t
        }));
        let mut loops = self.free_loops.clone();
        loops.extend(other.free_loops.iter().map(|&l| l + offset));
        LinkDiagram::from_crossings(raw, loops, &[]).expect("disjoint union of valid diagrams is valid")
    }

    /// Connected sum splicing `other`'s arc `a2` into our arc `a1`.
    pub fn connected_sum(&self, other: &LinkDiagram, a1: Arc, a2: Arc) -> Result<LinkDiagram, DiagramError> {
        if !self.has_arc(a1) {
            return Err(DiagramError::ArcNotFound(a1));
        }
        if !other.has_arc(a2) {
            return Err(DiagramError::ArcNotFound(a2));
        }
        // summing along a crossingless loop just absorbs it
        if self.free_loops.contains(&a1) {
            let mut trimmed = self.clone();
            trimmed.free_loops.retain(|&l| l != a1);
            trimmed.components -= 1;
            if trimmed.num_crossings() == 0 && trimmed.free_loops.is_empty() {
                return Ok(other.clone());
            }
            return Ok(trimmed.disjoint_union(other));
        }
        if other.free_loops.contains(&a2) {
            return other.connected_sum(self, a2, a1);
        }

        let offset = self.arc_ids().last().copied().map_or(0, |m| m + 1);
        let a2r = a2 + offset;
        let mut raw: Vec<[Arc; 4]> = self.crossings.iter().map(|x| x.arcs).collect();
        let base = raw.len();
        raw.extend(other.crossings.iter().map(|x| {
            let mut t = x.arcs;
            for a in t.iter_mut() {
                *a += offset;
            }
            t
        }));
        // cut both arcs at a point and rejoin respecting orientation: the
        // head slot of each arc takes the other's label
        let head_slot = |d: &LinkDiagram, a: Arc, base: usize| -> (usize, u8) {
            let info = &d.arcs[&a];
            let (ci, p) = if info.forward { info.ends[1] } else { info.ends[0] };
            (ci + base, p)
        };
        let h1 = head_slot(self, a1, 0);
        let h2 = head_slot(other, a2, base);
        raw[h1.0][h1.1 as usize] = a2r;
        raw[h2.0][h2.1 as usize] = a1;
        let mut loops = self.free_loops.clone();
        loops.extend(other.free_loops.iter().map(|&l| l + offset));
        LinkDiagram::from_crossings(raw, loops, &[])
    }
}

/// Parses PD-code text: whitespace/comma-separated `X[a,b,c,d]` tokens,
/// or the literal `U` for the crossingless unknot.
pub fn parse_pd(text: &str) -> Result<LinkDiagram, DiagramError> {
    let cleaned = text.replace("],", "] ");
    let tokens: Vec<&str> = cleaned.split_whitespace().map(|t| t.trim_matches(',')).filter(|t| !t.is_empty()).collect();
    if tokens.is_empty() {
        return Err(DiagramError::MalformedSyntax("empty input".into()));
    }
    if tokens.len() == 1 && tokens[0] == "U" {
        return LinkDiagram::from_crossings(Vec::new(), vec![0], &[]);
    }
    let mut raw = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let inner = tok
            .strip_prefix("X[")
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| DiagramError::MalformedSyntax(tok.to_string()))?;
        let parts: Vec<&str> = inner.split(',').map(|s| s.trim()).collect();
        if parts.len() != 4 {
            return Err(DiagramError::MalformedSyntax(tok.to_string()));
        }
        let mut t = [0u32; 4];
        for (i, part) in parts.iter().enumerate() {
            let v: u32 = part.parse().map_err(|_| DiagramError::MalformedSyntax(tok.to_string()))?;
            if v == 0 {
                return Err(DiagramError::MalformedSyntax(tok.to_string()));
            }
            t[i] = v;
        }
        raw.push(t);
    }
    LinkDiagram::from_crossings(raw, Vec::new(), &[])
}

/// Builds the closure of a braid word. Letter `±k` is the generator
/// `σ_k^{±1}` acting on strand positions `k, k+1` (1-based); the strand
/// moving from position `k+1` to `k` passes over for a positive letter,
/// making it a positive crossing. The strand count is `max |letter| + 1`
/// when not given.
pub fn parse_braid(word: &[i32], strands: Option<usize>) -> Result<LinkDiagram, DiagramError> {
    if word.contains(&0) {
        return Err(DiagramError::GeneratorOutOfRange { generator: 0, strands: strands.unwrap_or(0) });
    }
    let strands = match strands {
        Some(s) => s,
        None => {
            if word.is_empty() {
                return Err(DiagramError::EmptyWordWithoutStrandCount);
            }
            word.iter().map(|g| g.unsigned_abs() as usize).max().unwrap() + 1
        }
    };
    if strands == 0 {
        return Err(DiagramError::EmptyWordWithoutStrandCount);
    }
    for &g in word {
        if g.unsigned_abs() as usize >= strands {
            return Err(DiagramError::GeneratorOutOfRange { generator: g, strands });
        }
    }

    // arcs 1..=strands enter at the top; fresh labels appear below each letter
    let top: Vec<Arc> = (1..=strands as u32).collect();
    let mut current = top.clone();
    let mut next_arc = strands as u32 + 1;
    let mut raw: Vec<[Arc; 4]> = Vec::with_capacity(word.len());
    // (arc, head-is-second-endpoint) hints orienting all strands downward;
    // recorded as arc -> flows-into-lower-ends once endpoints are known
    let mut heads_down: Vec<Arc> = Vec::new();
    for &g in word {
        let i = (g.unsigned_abs() - 1) as usize;
        let (tl, tr) = (current[i], current[i + 1]);
        let bl = next_arc;
        let br = next_arc + 1;
        next_arc += 2;
        if g > 0 {
            raw.push([tl, bl, br, tr]);
        } else {
            raw.push([tr, tl, bl, br]);
        }
        heads_down.push(tl);
        heads_down.push(tr);
        current[i] = bl;
        current[i + 1] = br;
    }

    // plat closure: identify each bottom arc with the matching top arc
    let mut repr: BTreeMap<Arc, Arc> = BTreeMap::new();
    fn find(repr: &mut BTreeMap<Arc, Arc>, a: Arc) -> Arc {
        let mut a = a;
        while let Some(&p) = repr.get(&a) {
            if p == a {
                break;
            }
            a = p;
        }
        a
    }
    for a in 1..next_arc {
        repr.insert(a, a);
    }
    let mut free = Vec::new();
    for pos in 0..strands {
        let a = find(&mut repr, current[pos]);
        let b = find(&mut repr, top[pos]);
        if a == b {
            // an untouched strand closes into a crossingless loop
            if current[pos] == top[pos] {
                free.push(top[pos]);
            }
        } else {
            let m = a.min(b);
            repr.insert(a.max(b), m);
        }
    }
    let canon: BTreeMap<Arc, Arc> = (1..next_arc).map(|a| (a, find(&mut repr, a))).collect();
    for t in raw.iter_mut() {
        for a in t.iter_mut() {
            *a = canon[a];
        }
    }
    // strand direction hints: each top port is where its arc arrives
    let mut forced: Vec<(Arc, bool)> = Vec::new();
    let mut ends: BTreeMap<Arc, Vec<ArcEnd>> = BTreeMap::new();
    for (ci, x) in raw.iter().enumerate() {
        for (p, &a) in x.iter().enumerate() {
            ends.entry(a).or_default().push((ci, p as u8));
        }
    }
    for (ci, (&g, chunk)) in word.iter().zip(heads_down.chunks(2)).enumerate() {
        // top ports of crossing ci: positive [TL,_,_,TR] = ports 0,3;
        // negative [TR,TL,_,_] = ports 1,0
        let ports: [(Arc, u8); 2] = if g > 0 {
            [(canon[&chunk[0]], 0), (canon[&chunk[1]], 3)]
        } else {
            [(canon[&chunk[0]], 1), (canon[&chunk[1]], 0)]
        };
        for (a, p) in ports {
            let mut e = ends[&a].clone();
            e.sort_unstable();
            let idx = if e[0] == (ci, p) { 0 } else { 1 };
            forced.push((a, idx == 1));
        }
    }
    LinkDiagram::from_crossings(raw, free, &forced)
}

// ---------------------------------------------------------------------------
// resolutions

/// One passage of a circle through a resolved crossing: arrive along
/// `arc`, enter the smoothing strand at `entry`, leave at `exit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Visit {
    pub arc: Arc,
    pub crossing: usize,
    pub entry: u8,
    pub exit: u8,
}

impl Visit {
    /// Strand index within the crossing: 0 for the strand containing
    /// port 0, 1 for the other.
    pub fn strand(&self) -> u8 {
        match self.entry {
            0 => 0,
            2 => 1,
            // ports 1 and 3 belong to strand 1 resp. 0 in the
            // 1-resolution and to strand 0 resp. 1 in the 0-resolution;
            // entry+exit disambiguates without knowing the bit
            1 => {
                if self.exit == 0 {
                    0
                } else {
                    1
                }
            }
            _ => {
                if self.exit == 0 {
                    0
                } else {
                    1
                }
            }
        }
    }

    /// The resolution site lies to the left of the traversal direction
    /// exactly when the exit port is ccw-adjacent after the entry port.
    pub fn site_on_left(&self) -> bool {
        self.exit == (self.entry + 1) % 4
    }
}

/// A circle of a complete resolution: arcs traversed in cyclic order,
/// with `visits[i]` the crossing passage reached along `arcs[i]`. A
/// crossingless loop has one arc and no visits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    pub arcs: Vec<Arc>,
    pub visits: Vec<Visit>,
}

impl Circle {
    pub fn min_arc(&self) -> Arc {
        *self.arcs.iter().min().expect("circle has at least one arc")
    }

    /// Reverses the traversal direction (for symmetry checks).
    pub fn reversed(&self) -> Circle {
        if self.visits.is_empty() {
            return self.clone();
        }
        let n = self.visits.len();
        let mut arcs = Vec::with_capacity(n);
        let mut visits = Vec::with_capacity(n);
        // reversed, visit k is reached along the arc we formerly exited on
        for k in (0..n).rev() {
            arcs.push(self.arcs[(k + 1) % n]);
            let v = self.visits[k];
            visits.push(Visit { arc: self.arcs[(k + 1) % n], crossing: v.crossing, entry: v.exit, exit: v.entry });
        }
        Circle { arcs, visits }
    }
}

/// The complete resolution 𝓛(v): circles sorted by minimal arc id.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub vertex: Vertex,
    pub circles: Vec<Circle>,
    strand_loc: BTreeMap<(usize, u8), (usize, usize)>,
}

impl Resolution {
    pub fn num_circles(&self) -> usize {
        self.circles.len()
    }

    /// Which circle (and which visit on it) carries the given strand of
    /// the given crossing.
    pub fn strand_location(&self, crossing: usize, strand: u8) -> (usize, usize) {
        self.strand_loc[&(crossing, strand)]
    }

    pub fn circle_of_strand(&self, crossing: usize, strand: u8) -> usize {
        self.strand_loc[&(crossing, strand)].0
    }

    /// The circle containing a given arc, if any.
    pub fn circle_of_arc(&self, a: Arc) -> Option<usize> {
        self.circles.iter().position(|c| c.arcs.contains(&a))
    }
}

/// Port pairing inside a resolved crossing.
fn smoothing_partner(port: u8, bit: u8) -> u8 {
    if bit == 0 {
        match port {
            0 => 1,
            1 => 0,
            2 => 3,
            _ => 2,
        }
    } else {
        match port {
            0 => 3,
            3 => 0,
            1 => 2,
            _ => 1,
        }
    }
}

/// Traces the complete resolution of `d` at cube vertex `v` (bit k is
/// the resolution of crossing k).
pub fn resolve(d: &LinkDiagram, v: Vertex) -> Result<Resolution, DiagramError> {
    let n = d.num_crossings();
    if n < 32 && (v >> n) != 0 {
        return Err(DiagramError::LengthMismatch { got: 32 - v.leading_zeros() as usize, expected: n });
    }
    let bit = |k: usize| -> u8 { ((v >> k) & 1) as u8 };

    let mut circles: Vec<Circle> = d
        .free_loops
        .iter()
        .map(|&l| Circle { arcs: vec![l], visits: Vec::new() })
        .collect();

    let mut visited: BTreeSet<Arc> = BTreeSet::new();
    let arc_list: Vec<Arc> = d.arcs.keys().copied().collect();
    for &a0 in &arc_list {
        if visited.contains(&a0) {
            continue;
        }
        let mut arcs = Vec::new();
        let mut visits = Vec::new();
        // traverse a0 from its first endpoint toward its second
        let start = d.arcs[&a0].ends[1];
        let (mut ci, mut p) = start;
        let mut a = a0;
        loop {
            visited.insert(a);
            arcs.push(a);
            let q = smoothing_partner(p, bit(ci));
            visits.push(Visit { arc: a, crossing: ci, entry: p, exit: q });
            a = d.crossings[ci].arcs[q as usize];
            let info = &d.arcs[&a];
            // a kink arc occupies two ports of the same crossing; the
            // endpoints are distinct (crossing, port) pairs either way
            let e = if info.ends[0] == (ci, q) { info.ends[1] } else { info.ends[0] };
            ci = e.0;
            p = e.1;
            if a == a0 && (ci, p) == start {
                break;
            }
        }
        circles.push(Circle { arcs, visits });
    }

    circles.sort_by_key(|c| c.min_arc());
    let mut strand_loc = BTreeMap::new();
    for (i, c) in circles.iter().enumerate() {
        for (k, vis) in c.visits.iter().enumerate() {
            strand_loc.insert((vis.crossing, vis.strand()), (i, k));
        }
    }
    Ok(Resolution { vertex: v, circles, strand_loc })
}

// ---------------------------------------------------------------------------
// saddles

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaddleKind {
    Merge,
    Split,
}

/// The elementary saddle along a cube edge `u → v` (crossing `k` flips
/// 1 → 0), with the circle correspondence away from the saddle site.
#[derive(Clone, Debug)]
pub struct SaddleDescriptor {
    pub crossing: usize,
    pub kind: SaddleKind,
    /// affected circle indices in the source resolution (two for a
    /// merge, one for a split)
    pub sources: Vec<usize>,
    /// affected circle indices in the target resolution
    pub targets: Vec<usize>,
    /// (source circle, target circle) pairs for the product annuli
    pub unaffected: Vec<(usize, usize)>,
}

/// Computes the saddle descriptor for the edge `u → v`; `u > v` must
/// differ from `v` in exactly one bit.
pub fn edge_saddle(d: &LinkDiagram, u: Vertex, v: Vertex) -> Result<SaddleDescriptor, DiagramError> {
    let ru = resolve(d, u)?;
    let rv = resolve(d, v)?;
    saddle_between(d, &ru, &rv)
}

/// Same as [`edge_saddle`] but reusing already-computed resolutions.
pub fn saddle_between(
    _d: &LinkDiagram,
    ru: &Resolution,
    rv: &Resolution,
) -> Result<SaddleDescriptor, DiagramError> {
    let (u, v) = (ru.vertex, rv.vertex);
    let diff = u ^ v;
    if diff == 0 || !diff.is_power_of_two() || (u & diff) == 0 {
        return Err(DiagramError::NotAnEdge { u, v });
    }
    let k = diff.trailing_zeros() as usize;

    let su = (ru.circle_of_strand(k, 0), ru.circle_of_strand(k, 1));
    let sv = (rv.circle_of_strand(k, 0), rv.circle_of_strand(k, 1));
    let (kind, sources, targets) = match (su.0 == su.1, sv.0 == sv.1) {
        (false, true) => (SaddleKind::Merge, vec![su.0.min(su.1), su.0.max(su.1)], vec![sv.0]),
        (true, false) => (SaddleKind::Split, vec![su.0], vec![sv.0.min(sv.1), sv.0.max(sv.1)]),
        _ => return Err(DiagramError::NonPlanar(k)),
    };
    if ru.num_circles() as i64 - rv.num_circles() as i64
        != if kind == SaddleKind::Merge { 1 } else { -1 }
    {
        return Err(DiagramError::NonPlanar(k));
    }

    // product annuli: match untouched circles by their minimal arc
    let mut by_min: BTreeMap<Arc, usize> = BTreeMap::new();
    for (i, c) in rv.circles.iter().enumerate() {
        if !targets.contains(&i) {
            by_min.insert(c.min_arc(), i);
        }
    }
    let mut unaffected = Vec::new();
    for (i, c) in ru.circles.iter().enumerate() {
        if sources.contains(&i) {
            continue;
        }
        let j = *by_min.get(&c.min_arc()).ok_or(DiagramError::NonPlanar(k))?;
        if rv.circles[j].arcs.iter().collect::<BTreeSet<_>>() != c.arcs.iter().collect::<BTreeSet<_>>() {
            return Err(DiagramError::NonPlanar(k));
        }
        unaffected.push((i, j));
    }
    Ok(SaddleDescriptor { crossing: k, kind, sources, targets, unaffected })
}

impl fmt::Display for SaddleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SaddleKind::Merge => write!(f, "merge"),
            SaddleKind::Split => write!(f, "split"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const TREFOIL_PD: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";

    #[test]
    fn parse_trefoil() {
        let d = parse_pd(TREFOIL_PD).unwrap();
        assert_eq!(d.num_crossings(), 3);
        assert_eq!(d.arc_ids().len(), 6);
        assert_eq!(d.components(), 1);
        // the standard 3_1 is the all-negative trefoil
        assert_eq!((d.n_plus(), d.n_minus()), (0, 3));
    }

    #[test]
    fn parse_unknot_token() {
        let d = parse_pd("U").unwrap();
        assert_eq!(d.num_crossings(), 0);
        assert_eq!(d.components(), 1);
        assert_eq!((d.n_plus(), d.n_minus()), (0, 0));
        let r = resolve(&d, 0).unwrap();
        assert_eq!(r.num_circles(), 1);
        assert!(r.circles[0].visits.is_empty());
    }

    #[test]
    fn parse_open_arc_fails() {
        let err = parse_pd("X[1,2,2,3]").unwrap_err();
        assert!(matches!(err, DiagramError::InconsistentArcs(_)));
    }

    #[test]
    fn parse_garbage_fails() {
        assert!(matches!(parse_pd("Y[1,2,3,4]"), Err(DiagramError::MalformedSyntax(_))));
        assert!(matches!(parse_pd("X[1,2,3]"), Err(DiagramError::MalformedSyntax(_))));
        assert!(matches!(parse_pd(""), Err(DiagramError::MalformedSyntax(_))));
    }

    #[test]
    fn one_crossing_kink_parses() {
        // positive kink: X[1,2,2,1] closes to a 1-crossing unknot
        let d = parse_pd("X[1,2,2,1]").unwrap();
        assert_eq!(d.num_crossings(), 1);
        assert_eq!(d.components(), 1);
        assert_eq!(d.n_plus() + d.n_minus(), 1);
    }

    #[test]
    fn braid_trefoil() {
        let d = parse_braid(&[1, 1, 1], None).unwrap();
        assert_eq!(d.num_crossings(), 3);
        assert_eq!(d.components(), 1);
        assert_eq!((d.n_plus(), d.n_minus()), (3, 0));
    }

    #[test]
    fn braid_empty_word() {
        assert!(matches!(parse_braid(&[], None), Err(DiagramError::EmptyWordWithoutStrandCount)));
        let d = parse_braid(&[], Some(1)).unwrap();
        assert_eq!(d.num_crossings(), 0);
        assert_eq!(d.components(), 1);
    }

    #[test]
    fn braid_generator_range() {
        assert!(matches!(
            parse_braid(&[3], Some(2)),
            Err(DiagramError::GeneratorOutOfRange { generator: 3, strands: 2 })
        ));
    }

    #[test]
    fn braid_negative_signs() {
        let d = parse_braid(&[-1, -1], None).unwrap();
        assert_eq!((d.n_plus(), d.n_minus()), (0, 2));
    }

    #[test]
    fn mirror_swaps_signs_and_is_involutive() {
        let d = parse_pd(TREFOIL_PD).unwrap();
        let m = d.mirror();
        assert_eq!((m.n_plus(), m.n_minus()), (3, 0));
        let mm = m.mirror();
        let a: Vec<[Arc; 4]> = d.crossings().iter().map(|x| x.arcs).collect();
        let b: Vec<[Arc; 4]> = mm.crossings().iter().map(|x| x.arcs).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn mirror_unknot_is_itself() {
        let d = parse_pd("U").unwrap();
        let m = d.mirror();
        assert_eq!(m.num_crossings(), 0);
        assert_eq!(m.components(), 1);
    }

    #[test]
    fn disjoint_union_of_unknots() {
        let u = parse_pd("U").unwrap();
        let uu = u.disjoint_union(&u);
        assert_eq!(uu.components(), 2);
        assert_eq!(uu.num_crossings(), 0);
        assert_eq!(resolve(&uu, 0).unwrap().num_circles(), 2);
    }

    #[test]
    fn resolve_rejects_long_vertex() {
        let d = parse_pd(TREFOIL_PD).unwrap();
        assert!(matches!(resolve(&d, 0b1000), Err(DiagramError::LengthMismatch { .. })));
    }

    #[test]
    fn saddle_not_an_edge() {
        let d = parse_pd(TREFOIL_PD).unwrap();
        assert!(matches!(edge_saddle(&d, 0b011, 0b011), Err(DiagramError::NotAnEdge { .. })));
        assert!(matches!(edge_saddle(&d, 0b011, 0b000), Err(DiagramError::NotAnEdge { .. })));
        assert!(matches!(edge_saddle(&d, 0b001, 0b011), Err(DiagramError::NotAnEdge { .. })));
    }

    #[test]
    fn kink_saddle_has_tiny_correspondence() {
        let d = parse_pd("X[1,2,2,1]").unwrap();
        let s = edge_saddle(&d, 1, 0).unwrap();
        assert!(s.unaffected.len() <= 1);
        let cu = resolve(&d, 1).unwrap().num_circles() as i64;
        let cv = resolve(&d, 0).unwrap().num_circles() as i64;
        match s.kind {
            SaddleKind::Merge => assert_eq!(cu - cv, 1),
            SaddleKind::Split => assert_eq!(cv - cu, 1),
        }
    }

    #[test]
    fn connected_sum_arc_errors() {
        let d = parse_pd(TREFOIL_PD).unwrap();
        assert!(matches!(d.connected_sum(&d, 99, 1), Err(DiagramError::ArcNotFound(99))));
    }

    #[test]
    fn connected_sum_with_unknot_is_identity_shape() {
        let d = parse_pd(TREFOIL_PD).unwrap();
        let u = parse_pd("U").unwrap();
        let s = d.connected_sum(&u, 1, 0).unwrap();
        assert_eq!(s.num_crossings(), 3);
        assert_eq!(s.components(), 1);
    }

    #[test]
    fn connected_sum_of_trefoils() {
        let d = parse_pd(TREFOIL_PD).unwrap();
        let s = d.connected_sum(&d, 1, 1).unwrap();
        assert_eq!(s.num_crossings(), 6);
        assert_eq!(s.components(), 1);
        assert_eq!((s.n_plus(), s.n_minus()), (0, 6));
    }

    #[test]
    fn circle_reversal_flips_sides() {
        let d = parse_pd(TREFOIL_PD).unwrap();
        let r = resolve(&d, 0b111).unwrap();
        for c in &r.circles {
            let rev = c.reversed();
            assert_eq!(rev.visits.len(), c.visits.len());
            for v in &c.visits {
                let w = rev
                    .visits
                    .iter()
                    .find(|w| w.crossing == v.crossing && w.strand() == v.strand())
                    .unwrap();
                assert_eq!(w.site_on_left(), !v.site_on_left());
            }
            assert_eq!(rev.reversed(), *c);
        }
    }
}
