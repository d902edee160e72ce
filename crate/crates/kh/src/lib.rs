//! Khovanov homology of links, computed the long way around: the cube of
//! resolutions is lifted to the Burnside category (matrices of finite
//! sets with coherent 2-isomorphisms), certified by the lax-functor
//! coherence equation, then totalized, dualized and shifted into the
//! bigraded integer Khovanov complex. An independent Kauffman state sum
//! cross-checks the graded Euler characteristic, and the combinatorial
//! flow category with its moduli census is extracted from the same lift.

pub mod burnside;
pub mod cli;
pub mod cube;
pub mod diagram;
pub mod flowcat;
pub mod homology;
pub mod intmat;
pub mod khovanov;

/// A cube vertex: bit `k` holds the resolution of crossing `k`.
pub type Vertex = u32;
