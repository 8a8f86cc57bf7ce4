//! Subset and permutation combinatorics: exponent statistics and descent polynomials.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactpoly::{HalfLaurent, RatScalar, Var};

/// Largest `ℓ` for which permutations are enumerated by default.
pub const STANLEY_CAP: u32 = 9;

/// Structural bound on `ℓ` imposed by 64-bit masks.
pub const MAX_ELL: u32 = 60;

/// The ground set a [`SubsetMask`] lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ground {
    /// `[1, ℓ-1]`
    OneToLm1,
    /// `[0, ℓ-1]`
    ZeroToLm1,
    /// `[1, ℓ]`
    OneToL,
}

impl Ground {
    fn range(self, ell: u32) -> (u32, u32) {
        match self {
            Ground::OneToLm1 => (1, ell.saturating_sub(1)),
            Ground::ZeroToLm1 => (0, ell.saturating_sub(1)),
            Ground::OneToL => (1, ell),
        }
    }

    fn mask(self, ell: u32) -> u64 {
        let (lo, hi) = self.range(ell);
        if ell == 0 || hi < lo {
            return 0;
        }
        (lo..=hi).fold(0u64, |m, i| m | (1 << i))
    }
}

/// A subset of one of the ground sets `[1,ℓ-1]`, `[0,ℓ-1]` or `[1,ℓ]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsetMask {
    bits: u64,
    ell: u32,
    ground: Ground,
}

impl SubsetMask {
    pub fn from_bits(ell: u32, ground: Ground, bits: u64) -> Result<Self> {
        if ell == 0 || ell > MAX_ELL {
            return Err(Error::Usage(format!("ℓ must lie in [1, {MAX_ELL}], got {ell}")));
        }
        if bits & !ground.mask(ell) != 0 {
            return Err(Error::Usage(format!("mask {bits:#b} is not inside the ground set for ℓ={ell}")));
        }
        Ok(SubsetMask { bits, ell, ground })
    }

    pub fn new(ell: u32, ground: Ground, elements: &[u32]) -> Result<Self> {
        let mut bits = 0u64;
        for &e in elements {
            if e > 63 {
                return Err(Error::Usage(format!("element {e} out of range")));
            }
            bits |= 1 << e;
        }
        Self::from_bits(ell, ground, bits)
    }

    pub fn empty(ell: u32, ground: Ground) -> Self {
        SubsetMask { bits: 0, ell, ground }
    }

    pub fn full(ell: u32, ground: Ground) -> Self {
        SubsetMask { bits: ground.mask(ell), ell, ground }
    }

    /// All subsets of the ground set, in increasing mask order.
    pub fn all(ell: u32, ground: Ground) -> impl Iterator<Item = SubsetMask> {
        let full = ground.mask(ell);
        let mut sub: Option<u64> = Some(0);
        std::iter::from_fn(move || {
            let cur = sub?;
            sub = if cur == full { None } else { Some(((cur | !full).wrapping_add(1)) & full) };
            Some(SubsetMask { bits: cur, ell, ground })
        })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn ground(&self) -> Ground {
        self.ground
    }

    pub fn len(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, i: u32) -> bool {
        i < 64 && self.bits & (1 << i) != 0
    }

    pub fn elements(&self) -> Vec<u32> {
        (0..64).filter(|&i| self.contains(i)).collect()
    }

    /// Complement inside the ground set (`K'` or `H†`).
    pub fn complement(&self) -> Self {
        SubsetMask { bits: self.ground.mask(self.ell) & !self.bits, ell: self.ell, ground: self.ground }
    }

    /// Reinterprets the subset in a larger ground set.
    pub fn widen(&self, ground: Ground) -> Result<Self> {
        Self::from_bits(self.ell, ground, self.bits)
    }

    pub fn union(&self, other: &Self) -> Self {
        SubsetMask { bits: self.bits | other.bits, ..*self }
    }

    pub fn intersect_bits(&self, mask: u64) -> Self {
        SubsetMask { bits: self.bits & mask, ..*self }
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let els: Vec<String> = self.elements().iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", els.join(","))
    }
}

/// A permutation of `[1, ℓ]` given by its images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return Err(Error::Usage(format!("{images:?} is not a permutation of [1,{n}]")));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(ell: u32) -> Self {
        Permutation { images: (1..=ell).collect() }
    }

    pub fn ell(&self) -> u32 {
        self.images.len() as u32
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `D(π) = { i : π(i) > π(i+1) }`.
    pub fn descent_set(&self) -> SubsetMask {
        SubsetMask { bits: descent_bits(&self.images), ell: self.ell().max(1), ground: Ground::OneToLm1 }
    }

    pub fn inversions(&self) -> u64 {
        inversion_count(&self.images)
    }
}

fn descent_bits<T: PartialOrd>(images: &[T]) -> u64 {
    let mut bits = 0u64;
    for i in 1..images.len() {
        if images[i - 1] > images[i] {
            bits |= 1 << i;
        }
    }
    bits
}

fn inversion_count<T: PartialOrd>(images: &[T]) -> u64 {
    let mut inv = 0;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i] > images[j] {
                inv += 1;
            }
        }
    }
    inv
}

pub fn descent_set(pi: &Permutation) -> SubsetMask {
    pi.descent_set()
}

pub fn inversions(pi: &Permutation) -> u64 {
    pi.inversions()
}

/// Calls `f(images)` for every permutation of `[1, ℓ]` in lexicographic order.
pub fn for_each_permutation<F: FnMut(&[u8])>(ell: u32, mut f: F) {
    let mut p: Vec<u8> = (1..=ell as u8).collect();
    loop {
        f(&p);
        let n = p.len();
        if n < 2 {
            return;
        }
        let mut i = n - 1;
        while i > 0 && p[i - 1] >= p[i] {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        let mut j = n - 1;
        while p[j] <= p[i - 1] {
            j -= 1;
        }
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// `table[descent-mask][inv]` counts for all of `S_ℓ`.
pub type DescentTable = Vec<Vec<u64>>;

fn stanley_cache() -> &'static Mutex<HashMap<u32, Arc<DescentTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<DescentTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Joint distribution of descent set and inversion number over `S_ℓ`.
pub fn descent_table(ell: u32, cap: u32) -> Result<Arc<DescentTable>> {
    if ell == 0 {
        return Err(Error::Usage("ℓ must be positive".into()));
    }
    if ell > cap {
        return Err(Error::Resource(format!("permutation enumeration for ℓ={ell} exceeds the cap ℓ≤{cap}")));
    }
    if let Some(t) = stanley_cache().lock().expect("cache poisoned").get(&ell) {
        return Ok(t.clone());
    }
    let top = (ell * (ell - 1) / 2) as usize;
    let mut table = vec![vec![0u64; top + 1]; 1usize << ell];
    for_each_permutation(ell, |p| {
        table[descent_bits(p) as usize][inversion_count(p) as usize] += 1;
    });
    let table = Arc::new(table);
    stanley_cache().lock().expect("cache poisoned").insert(ell, table.clone());
    Ok(table)
}

fn check_k(ell: u32, k: &SubsetMask) -> Result<()> {
    if k.ell() != ell {
        return Err(Error::Usage(format!("subset built for ℓ={} used with ℓ={ell}", k.ell())));
    }
    if k.bits() & !Ground::OneToLm1.mask(ell) != 0 {
        return Err(Error::Usage(format!("{k} is not a subset of [1,{}]", ell.saturating_sub(1))));
    }
    Ok(())
}

/// `w_{ℓ,K}(q) = Σ_{D(π)=K} q^{inv(π)}` by enumeration of `S_ℓ`.
pub fn w_poly_stanley(ell: u32, k: &SubsetMask) -> Result<HalfLaurent> {
    w_poly_stanley_capped(ell, k, STANLEY_CAP)
}

pub fn w_poly_stanley_capped(ell: u32, k: &SubsetMask, cap: u32) -> Result<HalfLaurent> {
    check_k(ell, k)?;
    let table = descent_table(ell, cap)?;
    let row = &table[k.bits() as usize];
    Ok(HalfLaurent::from_terms(
        Var::Q,
        row.iter().enumerate().map(|(i, &c)| (2 * i as i64, RatScalar::from_integer(BigInt::from(c)))),
    ))
}

type Dense = Vec<BigInt>;

fn dense_mul(a: &Dense, b: &Dense) -> Dense {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact quotient by a divisor with leading coefficient 1.
fn dense_div_exact(num: &Dense, den: &Dense) -> Result<Dense> {
    let dl = den.len();
    if dl == 0 || !den[dl - 1].is_one() {
        return Err(Error::Internal("divisor must be monic".into()));
    }
    if num.len() < dl {
        return Err(Error::Internal("q-multinomial division is not exact".into()));
    }
    let mut rem = num.clone();
    let mut quot = vec![BigInt::zero(); num.len() - dl + 1];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dl - 1].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[k + j] -= &c * d;
        }
        quot[k] = c;
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return Err(Error::Internal("q-multinomial division is not exact".into()));
    }
    Ok(quot)
}

/// `[m]_q! = ∏_{k=1}^{m} (1 + q + … + q^{k-1})`.
pub fn q_factorial(m: u32) -> Vec<BigInt> {
    let mut acc: Dense = vec![BigInt::one()];
    for k in 1..=m {
        acc = dense_mul(&acc, &vec![BigInt::one(); k as usize]);
    }
    acc
}

/// q-multinomial `[ℓ]! / ∏ [parts_i]!` by exact division.
pub fn q_multinomial(parts: &[u32]) -> Result<Vec<BigInt>> {
    let total: u32 = parts.iter().sum();
    let mut den: Dense = vec![BigInt::one()];
    for &p in parts {
        den = dense_mul(&den, &q_factorial(p));
    }
    dense_div_exact(&q_factorial(total), &den)
}

/// `w_{ℓ,K}(q) = (-1)^{#K} Σ_{I⊂K} (-1)^{#I} [ℓ; i_1, i_2-i_1, …, ℓ-i_r]_q`.
pub fn w_poly_multinomial(ell: u32, k: &SubsetMask) -> Result<HalfLaurent> {
    check_k(ell, k)?;
    let kbits = k.bits();
    let mut acc: Vec<BigInt> = Vec::new();
    let mut sub = kbits;
    loop {
        let els: Vec<u32> = (1..ell).filter(|i| sub & (1 << i) != 0).collect();
        let mut parts = Vec::with_capacity(els.len() + 1);
        let mut prev = 0;
        for &i in &els {
            parts.push(i - prev);
            prev = i;
        }
        parts.push(ell - prev);
        let m = q_multinomial(&parts)?;
        let sign_neg = (k.len() - els.len() as u32) % 2 == 1;
        if acc.len() < m.len() {
            acc.resize(m.len(), BigInt::zero());
        }
        for (i, c) in m.into_iter().enumerate() {
            if sign_neg {
                acc[i] -= c;
            } else {
                acc[i] += c;
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & kbits;
    }
    Ok(HalfLaurent::from_terms(
        Var::Q,
        acc.into_iter().enumerate().map(|(i, c)| (2 * i as i64, RatScalar::from_integer(c))),
    ))
}

/// Engine choice: enumeration up to the cap, the multinomial formula beyond it.
pub fn w_poly(ell: u32, k: &SubsetMask) -> Result<HalfLaurent> {
    if ell <= STANLEY_CAP {
        w_poly_stanley(ell, k)
    } else {
        w_poly_multinomial(ell, k)
    }
}

fn check_eps(eps: i32) -> Result<i64> {
    match eps {
        1 | -1 => Ok(eps as i64),
        _ => Err(Error::Usage(format!("ε must be ±1, got {eps}"))),
    }
}

/// `a_ℓ^{(ε)}(K) = Σ_{i∈K} (ℓ(ℓ-ε)/2 - i(i-ε)/2)`; elements `0` allowed.
pub fn stat_a(ell: u32, k: &SubsetMask, eps: i32) -> Result<i64> {
    let e = check_eps(eps)?;
    let l = ell as i64;
    Ok(k.elements().iter().map(|&i| {
        let i = i as i64;
        l * (l - e) / 2 - i * (i - e) / 2
    }).sum())
}

/// `b_ℓ(K) = Σ_{i∈K} (ℓ-1-i)`; elements `0` allowed.
pub fn stat_b(ell: u32, k: &SubsetMask) -> i64 {
    let l = ell as i64;
    k.elements().iter().map(|&i| l - 1 - i as i64).sum()
}

/// Lengths of the maximal runs of consecutive integers in `K`.
pub fn runs(k: &SubsetMask) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let els = k.elements();
    let mut i = 0;
    while i < els.len() {
        let start = els[i];
        let mut end = start;
        while i + 1 < els.len() && els[i + 1] == end + 1 {
            i += 1;
            end += 1;
        }
        out.push((start, end));
        i += 1;
    }
    out
}

/// `N(K) = Σ_{maximal intervals I} #I(#I+1)/2`.
pub fn stat_n(k: &SubsetMask) -> i64 {
    runs(k).iter().map(|&(a, b)| {
        let len = (b - a + 1) as i64;
        len * (len + 1) / 2
    }).sum()
}

/// `μ^{(ε)}(K) = Σ_{k∈K} k(k-ε)/2 + N(K)`.
pub fn mu(k: &SubsetMask, eps: i32) -> Result<i64> {
    let e = check_eps(eps)?;
    Ok(k.elements().iter().map(|&i| {
        let i = i as i64;
        i * (i - e) / 2
    }).sum::<i64>() + stat_n(k))
}

/// `m_d^{(ε)} = d(d+1)(d+(7-3ε)/2)/6`.
pub fn min_mu(ell: u32, d: u32, eps: i32) -> Result<i64> {
    let e = check_eps(eps)?;
    if d < 1 || d + 1 > ell {
        return Err(Error::Usage(format!("need 1 ≤ d ≤ ℓ-1, got d={d}, ℓ={ell}")));
    }
    let d = d as i64;
    Ok(d * (d + 1) * (2 * d + 7 - 3 * e) / 12)
}

/// Minimum of `μ^{(ε)}` over `#K = d` by exhaustion.
pub fn min_mu_brute(ell: u32, d: u32, eps: i32) -> Result<i64> {
    let mut best: Option<i64> = None;
    for k in SubsetMask::all(ell, Ground::OneToLm1).filter(|k| k.len() == d) {
        let m = mu(&k, eps)?;
        best = Some(best.map_or(m, |b| b.min(m)));
    }
    best.ok_or_else(|| Error::Usage(format!("no subsets of size {d} for ℓ={ell}")))
}

/// `I^♭ = {a_ν-1, b_ν} ∩ [0,ℓ-1]` over the maximal intervals `[a_ν,b_ν]` of `I ⊂ [1,ℓ]`.
pub fn flat(i: &SubsetMask) -> Result<SubsetMask> {
    if i.ground() != Ground::OneToL {
        return Err(Error::Usage("flat expects a subset of [1,ℓ]".into()));
    }
    let ell = i.ell();
    let mut bits = 0u64;
    for (a, b) in runs(i) {
        bits |= 1 << (a - 1);
        if b < ell {
            bits |= 1 << b;
        }
    }
    SubsetMask::from_bits(ell, Ground::ZeroToLm1, bits)
}

/// Union over odd `ν` of `[j_ν+1, j_{ν+1}]` with `j_{t+1} = ℓ`.
fn odd_intervals(ell: u32, js: &[u32]) -> u64 {
    let mut bits = 0u64;
    let mut nu = 0;
    while nu < js.len() {
        let lo = js[nu] + 1;
        let hi = if nu + 1 < js.len() { js[nu + 1] } else { ell };
        for x in lo..=hi {
            bits |= 1 << x;
        }
        nu += 2;
    }
    bits
}

/// `H^♮ ⊂ [1,ℓ]` for `H ⊂ [0,ℓ-1]`; inverse of [`flat`].
pub fn natural(h: &SubsetMask) -> Result<SubsetMask> {
    if h.ground() != Ground::ZeroToLm1 {
        return Err(Error::Usage("natural expects a subset of [0,ℓ-1]".into()));
    }
    SubsetMask::from_bits(h.ell(), Ground::OneToL, odd_intervals(h.ell(), &h.elements()))
}

/// `𝔡(H,K)`: with `H △ K = {j_1 < … < j_t}`, the union over odd `ν` of `[j_ν+1, j_{ν+1}]`.
pub fn delta_set(h: &SubsetMask, k: &SubsetMask) -> Result<SubsetMask> {
    if h.ground() != Ground::ZeroToLm1 || k.ground() != Ground::OneToLm1 || h.ell() != k.ell() {
        return Err(Error::Usage("delta_set expects H ⊂ [0,ℓ-1] and K ⊂ [1,ℓ-1]".into()));
    }
    let ell = h.ell();
    let sym = h.bits() ^ k.bits();
    let js: Vec<u32> = (0..ell).filter(|j| sym & (1 << j) != 0).collect();
    SubsetMask::from_bits(ell, Ground::OneToL, odd_intervals(ell, &js))
}

/// `⟨J⟩ = Σ_ν (-1)^ν (j_ν - ℓ)`.
pub fn bracket(j: &SubsetMask) -> i64 {
    let l = j.ell() as i64;
    j.elements()
        .iter()
        .enumerate()
        .map(|(idx, &x)| if idx % 2 == 0 { -(x as i64 - l) } else { x as i64 - l })
        .sum()
}
