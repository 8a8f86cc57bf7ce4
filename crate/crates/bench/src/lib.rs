//! Fixtures shared by the benchmarks.

use maxlat::descent::{Ground, SubsetMask};
use maxlat::globalzeta::GlobalSpec;
use maxlat::latoracle::GramLattice;
use maxlat::localzeta::LocalInvariants;
use maxlat::totalash::TotalAshSpec;

/// Alternating run pattern `{1, 3, 5, …}` in `[1, ℓ-1]`.
pub fn odd_subset(ell: u32) -> SubsetMask {
    let bits = (1..ell).filter(|i| i % 2 == 1).fold(0u64, |b, i| b | 1 << i);
    SubsetMask::from_bits(ell, Ground::OneToLm1, bits).expect("valid subset")
}

pub fn total_spec(ell: u32) -> TotalAshSpec {
    TotalAshSpec::new(ell, -1, -1).expect("valid spec")
}

pub fn ramified_local(p: u64, ell: u32) -> LocalInvariants {
    LocalInvariants::orthogonal(p, ell, 1, -1, -1, 2).expect("valid invariants")
}

pub fn global_specs() -> Vec<(&'static str, GlobalSpec)> {
    vec![
        ("gl3", GlobalSpec::gl(3, 1000).expect("gl")),
        ("sp6", GlobalSpec::symplectic(3, 1000).expect("sp")),
        ("go6", GlobalSpec::go6_nonsplit(1000).expect("go6")),
    ]
}

pub fn c2() -> GramLattice {
    GramLattice::split_symplectic(2)
}
