//! Global Euler products: exact Dirichlet coefficients, pole data and asymptotics.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactpoly::parse_exp2;
use crate::localzeta::{
    self, by_index, classify_unramified, gl_local_factor, is_prime, DiscClass, LocalFactor,
    LocalInvariants, LocalKind,
};

/// Bits available in `f64`.
pub const MAX_PRECISION_BITS: u32 = 53;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlobalKind {
    /// All sublattices of `Z^n`.
    Gl,
    EvenSplit,
    EvenNonsplit,
    Odd,
    Symplectic,
}

impl std::str::FromStr for GlobalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gl" => Ok(GlobalKind::Gl),
            "even-split" => Ok(GlobalKind::EvenSplit),
            "even-nonsplit" => Ok(GlobalKind::EvenNonsplit),
            "odd" => Ok(GlobalKind::Odd),
            "symplectic" => Ok(GlobalKind::Symplectic),
            _ => Err(Error::Usage(format!("unknown kind {s:?}"))),
        }
    }
}

/// Global data: kind, dimension, discriminant, local overrides at bad primes, truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalSpec {
    pub kind: GlobalKind,
    pub n: u32,
    pub discriminant: i64,
    #[serde(rename = "badPrimes")]
    pub bad_primes: BTreeMap<u64, LocalInvariants>,
    #[serde(rename = "primeBound")]
    pub prime_bound: u64,
    #[serde(rename = "precisionBits")]
    pub precision_bits: u32,
}

fn squarefree_part(d: i64) -> i64 {
    let sign = d.signum();
    let mut x = d.unsigned_abs();
    let mut out = 1u64;
    let mut p = 2u64;
    while p * p <= x {
        let mut k = 0;
        while x.is_multiple_of(p) {
            x /= p;
            k += 1;
        }
        if k % 2 == 1 {
            out *= p;
        }
        p += 1;
    }
    sign * (out * x) as i64
}

fn is_square(d: i64) -> bool {
    if d < 0 {
        return false;
    }
    let r = (d as f64).sqrt().round() as i64;
    (r - 1..=r + 1).any(|t| t >= 0 && t * t == d)
}

fn legendre(a: i64, p: u64) -> i32 {
    let p = p as i64;
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let (mut r, mut b, mut e) = (1i128, a as i128, (p - 1) / 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as i128;
        }
        b = b * b % p as i128;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol `(d/m)` for `m ≥ 1`.
pub fn kronecker(d: i64, m: u64) -> i32 {
    let mut m = m;
    let mut out = 1i32;
    while m.is_multiple_of(2) {
        m /= 2;
        out *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let mut p = 3u64;
    while p * p <= m {
        while m.is_multiple_of(p) {
            m /= p;
            out *= legendre(d, p);
        }
        p += 2;
    }
    if m > 1 {
        out *= legendre(d, m);
    }
    out
}

/// Fundamental discriminant of `Q(√d)`.
pub fn fundamental_discriminant(d: i64) -> Result<i64> {
    if d == 0 || is_square(d) {
        return Err(Error::Domain(format!("{d} does not define a quadratic field")));
    }
    let d0 = squarefree_part(d);
    Ok(if d0.rem_euclid(4) == 1 { d0 } else { 4 * d0 })
}

/// `L(1, χ_d)` from the finite class-number formulas.
pub fn l_one(d: i64) -> f64 {
    let m = d.unsigned_abs();
    if d < 0 {
        let s: f64 = (1..m).map(|a| kronecker(d, a) as f64 * a as f64).sum();
        -PI * s / (m as f64).powf(1.5)
    } else {
        let s: f64 = (1..m).map(|a| kronecker(d, a) as f64 * (PI * a as f64 / m as f64).sin().ln()).sum();
        -s / (m as f64).sqrt()
    }
}

/// A floating value with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approx {
    pub value: f64,
    pub error: f64,
}

const BERNOULLI_2J: [f64; 11] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
];

fn check_precision(bits: u32) -> Result<()> {
    if bits == 0 || bits > MAX_PRECISION_BITS {
        return Err(Error::Precision(format!(
            "precision {bits} bits is outside 1..={MAX_PRECISION_BITS} (binary64 arithmetic)"
        )));
    }
    Ok(())
}

/// `ζ(x)` for real `x > 1` by Euler–Maclaurin summation.
pub fn zeta_real(x: f64, precision_bits: u32) -> Result<Approx> {
    check_precision(precision_bits)?;
    if !(x > 1.0) {
        return Err(Error::Domain(format!("ζ(x) needs x > 1, got {x}")));
    }
    let target = 2f64.powi(4 - precision_bits as i32);
    let mut n = 20u32;
    loop {
        let nf = n as f64;
        let mut sum: f64 = (1..n).rev().map(|k| (k as f64).powf(-x)).sum();
        sum += nf.powf(1.0 - x) / (x - 1.0) + 0.5 * nf.powf(-x);
        // B_{2j}/(2j)! · x(x+1)…(x+2j-2) · N^{-x-2j+1}
        let mut rising = x;
        let mut fact = 2.0;
        let mut term = 0.0;
        let terms = BERNOULLI_2J.len() - 1;
        for (j, b) in BERNOULLI_2J.iter().enumerate() {
            let jj = j as i32 + 1;
            term = b / fact * rising * nf.powf(-x - 2.0 * jj as f64 + 1.0);
            if j == terms {
                break;
            }
            sum += term;
            rising *= (x + 2.0 * jj as f64 - 1.0) * (x + 2.0 * jj as f64);
            fact *= (2.0 * jj as f64 + 1.0) * (2.0 * jj as f64 + 2.0);
        }
        let err = term.abs() + sum.abs() * 4.0 * f64::EPSILON * (n as f64).log2();
        if err < target || n > 5000 {
            return Ok(Approx { value: sum, error: err });
        }
        n *= 2;
    }
}

/// `ζ(α s - β)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaFactor {
    #[serde(with = "crate::exactpoly::decimal")]
    pub alpha: Rational64,
    #[serde(with = "crate::exactpoly::decimal")]
    pub beta: Rational64,
}

impl ZetaFactor {
    fn arg(&self, s: f64) -> f64 {
        r2f(self.alpha) * s - r2f(self.beta)
    }

    fn local(&self, p: f64, s: f64) -> f64 {
        1.0 - p.powf(-self.arg(s))
    }

    /// The point where the argument equals `1`.
    pub fn pole(&self) -> Rational64 {
        (self.beta + Rational64::one()) / self.alpha
    }
}

fn r2f(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// Coefficients `c(1..=M)`; `None` where a prime factor exceeds the prime bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletTrunc {
    pub coeffs: Vec<Option<BigInt>>,
}

impl DirichletTrunc {
    /// `c(m)` for `m ≥ 1`.
    pub fn get(&self, m: usize) -> Option<&BigInt> {
        self.coeffs.get(m.checked_sub(1)?)?.as_ref()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Leading singular data at the right-most pole.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleReport {
    pub kind: GlobalKind,
    #[serde(rename = "s0", with = "rat_str")]
    pub s0: Rational64,
    /// Location as printed, where it differs from the derived one.
    #[serde(rename = "s0Printed", with = "opt_rat_str", default)]
    pub s0_printed: Option<Rational64>,
    pub order: u32,
    /// Leading Laurent coefficient (residue for simple poles), including chain-rule factors.
    pub leading: f64,
    /// Same product without the chain-rule factors from the vanishing zeta arguments.
    #[serde(rename = "leadingLiteral")]
    pub leading_literal: f64,
    /// `true` when `leading` is the square root of the residue of the squared series.
    #[serde(rename = "squaredSeries")]
    pub squared_series: bool,
    #[serde(rename = "zetaPart")]
    pub zeta_part: f64,
    #[serde(rename = "eulerPart")]
    pub euler_part: f64,
    #[serde(rename = "tailBound")]
    pub tail_bound: Option<f64>,
    #[serde(rename = "lOne", default)]
    pub l_one: Option<f64>,
    #[serde(rename = "primeBound")]
    pub prime_bound: u64,
}

mod rat_str {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }

    pub fn parse(s: &str) -> Result<Rational64, String> {
        let (a, b) = s.split_once('/').unwrap_or((s, "1"));
        let a: i64 = a.trim().parse().map_err(|e| format!("{e}"))?;
        let b: i64 = b.trim().parse().map_err(|e| format!("{e}"))?;
        if b == 0 {
            return Err("zero denominator".into());
        }
        Ok(Rational64::new(a, b))
    }
}

mod opt_rat_str {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational64>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format!("{}/{}", r.numer(), r.denom())),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational64>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| super::rat_str::parse(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

/// Parses a rational written `a/b` or `a`.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    rat_str::parse(s).map_err(|e| Error::Usage(format!("bad rational {s:?}: {e}")))
}

/// Primes up to `bound` by sieve.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

/// Parses bad-prime overrides, one per line: `p ell n0 A B f [orthogonal|symplectic]`.
pub fn parse_bad_primes(text: &str) -> Result<BTreeMap<u64, LocalInvariants>> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 6 {
            return Err(Error::Config(format!("line {}: expected `p ell n0 A B f`", no + 1)));
        }
        let bad = |e: String| Error::Config(format!("line {}: {e}", no + 1));
        let p: u64 = f[0].parse().map_err(|e| bad(format!("{e}")))?;
        let ell: u32 = f[1].parse().map_err(|e| bad(format!("{e}")))?;
        let n0: u32 = f[2].parse().map_err(|e| bad(format!("{e}")))?;
        let a2 = parse_exp2(f[3]).map_err(|e| bad(e.to_string()))?;
        let b2 = parse_exp2(f[4]).map_err(|e| bad(e.to_string()))?;
        let fi: u8 = f[5].parse().map_err(|e| bad(format!("{e}")))?;
        let kind = match f.get(6).copied() {
            None | Some("orthogonal") => LocalKind::Orthogonal,
            Some("symplectic") => LocalKind::Symplectic,
            Some(k) => return Err(bad(format!("unknown kind {k:?}"))),
        };
        let inv = LocalInvariants { p, ell, n0, a2, b2, f: fi, kind };
        inv.validate().map_err(|e| bad(e.to_string()))?;
        out.insert(p, inv);
    }
    Ok(out)
}

impl GlobalSpec {
    pub fn new(
        kind: GlobalKind,
        n: u32,
        discriminant: i64,
        bad_primes: BTreeMap<u64, LocalInvariants>,
        prime_bound: u64,
        precision_bits: u32,
    ) -> Result<Self> {
        let spec = GlobalSpec { kind, n, discriminant, bad_primes, prime_bound, precision_bits };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gl(n: u32, prime_bound: u64) -> Result<Self> {
        Self::new(GlobalKind::Gl, n, 1, BTreeMap::new(), prime_bound, MAX_PRECISION_BITS)
    }

    pub fn symplectic(ell: u32, prime_bound: u64) -> Result<Self> {
        Self::new(GlobalKind::Symplectic, 2 * ell, 1, BTreeMap::new(), prime_bound, MAX_PRECISION_BITS)
    }

    /// `Z^6` with Gram `[[0,0,J_2],[0,2·1_2,0],[J_2,0,0]]`, discriminant field `Q(i)`.
    pub fn go6_nonsplit(prime_bound: u64) -> Result<Self> {
        let mut bad = BTreeMap::new();
        bad.insert(2, LocalInvariants::orthogonal(2, 2, 2, 0, 0, 1)?);
        Self::new(GlobalKind::EvenNonsplit, 6, 4, bad, prime_bound, MAX_PRECISION_BITS)
    }

    /// `(-1)^{n/2} D_L`.
    pub fn signed_disc(&self) -> i64 {
        if (self.n / 2) % 2 == 1 {
            -self.discriminant
        } else {
            self.discriminant
        }
    }

    fn orthogonal(&self) -> bool {
        matches!(self.kind, GlobalKind::EvenSplit | GlobalKind::EvenNonsplit | GlobalKind::Odd)
    }

    pub fn validate(&self) -> Result<()> {
        check_precision(self.precision_bits)?;
        if self.n == 0 {
            return Err(Error::Usage("dimension must be positive".into()));
        }
        match self.kind {
            GlobalKind::Gl => {}
            GlobalKind::Symplectic => {
                if self.n % 2 == 1 {
                    return Err(Error::Usage("symplectic dimension must be even".into()));
                }
            }
            GlobalKind::Odd => {
                if self.n.is_multiple_of(2) || self.n < 3 {
                    return Err(Error::Usage("odd kind needs odd n ≥ 3".into()));
                }
            }
            GlobalKind::EvenSplit | GlobalKind::EvenNonsplit => {
                if self.n % 2 == 1 || self.n < 2 {
                    return Err(Error::Usage("even kinds need even n ≥ 2".into()));
                }
                let split = is_square(self.signed_disc());
                if split != (self.kind == GlobalKind::EvenSplit) {
                    return Err(Error::Usage(format!(
                        "(-1)^(n/2)·D = {} is {}a square, inconsistent with kind {:?}",
                        self.signed_disc(),
                        if split { "" } else { "not " },
                        self.kind
                    )));
                }
            }
        }
        if self.orthogonal() {
            if self.discriminant == 0 {
                return Err(Error::Usage("discriminant must be nonzero".into()));
            }
            let mut d = self.discriminant.unsigned_abs();
            let mut p = 2u64;
            while d > 1 {
                if d.is_multiple_of(p) {
                    if !self.bad_primes.contains_key(&p) {
                        return Err(Error::Config(format!("no local data supplied for bad prime {p}")));
                    }
                    while d.is_multiple_of(p) {
                        d /= p;
                    }
                }
                p += 1;
            }
            if self.kind != GlobalKind::Odd && self.discriminant % 2 != 0 && !self.bad_primes.contains_key(&2) {
                let r = self.signed_disc().rem_euclid(8);
                if r != 1 && r != 5 {
                    return Err(Error::Config("p=2 cannot be classified; supply its local data".into()));
                }
            }
        }
        for (&p, inv) in &self.bad_primes {
            if inv.p != p {
                return Err(Error::Config(format!("override for {p} carries p={}", inv.p)));
            }
            let n = match inv.kind {
                LocalKind::Orthogonal => inv.n(),
                LocalKind::Symplectic => 2 * inv.ell,
            };
            if n != self.n {
                return Err(Error::Config(format!("override at {p} has dimension {n}, expected {}", self.n)));
            }
        }
        Ok(())
    }

    /// Local invariants at `p` (override or unramified classification).
    pub fn local_invariants(&self, p: u64) -> Result<LocalInvariants> {
        if let Some(inv) = self.bad_primes.get(&p) {
            return Ok(*inv);
        }
        match self.kind {
            GlobalKind::Gl => Err(Error::Usage("GL factors have no local invariants".into())),
            GlobalKind::Symplectic => LocalInvariants::symplectic(p, self.n / 2),
            GlobalKind::Odd => {
                if self.discriminant % p as i64 == 0 {
                    return Err(Error::Config(format!("no local data supplied for bad prime {p}")));
                }
                classify_unramified(p, self.n, DiscClass::OddN)
            }
            GlobalKind::EvenSplit | GlobalKind::EvenNonsplit => {
                if self.discriminant % p as i64 == 0 {
                    return Err(Error::Config(format!("no local data supplied for bad prime {p}")));
                }
                let d = self.signed_disc();
                let square = if p == 2 {
                    match d.rem_euclid(8) {
                        1 => true,
                        5 => false,
                        _ => return Err(Error::Config("p=2 cannot be classified".into())),
                    }
                } else {
                    legendre(d, p) == 1
                };
                let class = if square { DiscClass::Square } else { DiscClass::Nonsquare };
                classify_unramified(p, self.n, class)
            }
        }
    }
}

/// Builds local factors, reusing the symbolic numerator across primes of the same type.
pub struct FactorCache {
    spec: GlobalSpec,
    templates: HashMap<(u32, u32, i64, i64, u8, LocalKind), LocalFactor>,
}

impl FactorCache {
    pub fn new(spec: &GlobalSpec) -> Self {
        FactorCache { spec: spec.clone(), templates: HashMap::new() }
    }

    pub fn factor(&mut self, p: u64) -> Result<LocalFactor> {
        if self.spec.kind == GlobalKind::Gl {
            return gl_local_factor(p, self.spec.n);
        }
        let inv = self.spec.local_invariants(p)?;
        let key = (inv.ell, inv.n0, inv.a2, inv.b2, inv.f, inv.kind);
        if let std::collections::hash_map::Entry::Vacant(e) = self.templates.entry(key) {
            e.insert(localzeta::local_factor(&inv)?);
        }
        let mut lf = self.templates[&key].clone();
        lf.p = p;
        Ok(lf)
    }
}

/// Exact `c(m)` for `m ≤ M`, multiplicative over prime powers.
pub fn dirichlet_coeffs(spec: &GlobalSpec, m: usize) -> Result<DirichletTrunc> {
    spec.validate()?;
    if m == 0 {
        return Err(Error::Usage("need M ≥ 1".into()));
    }
    let mut spf = vec![0usize; m + 1];
    for i in 2..=m {
        if spf[i] == 0 {
            let mut j = i;
            while j <= m {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    let mut cache = FactorCache::new(spec);
    let mut local: HashMap<u64, Vec<BigInt>> = HashMap::new();
    let mut coeffs = Vec::with_capacity(m);
    for k in 1..=m {
        let mut x = k;
        let mut acc = Some(BigInt::one());
        while x > 1 {
            let p = spf[x];
            let mut e = 0usize;
            while x % p == 0 {
                x /= p;
                e += 1;
            }
            if p as u64 > spec.prime_bound && !spec.bad_primes.contains_key(&(p as u64)) {
                acc = None;
                break;
            }
            if let std::collections::hash_map::Entry::Vacant(e) = local.entry(p as u64) {
                let mut top = 0usize;
                let mut q = p;
                while q <= m {
                    top += 1;
                    q = q.saturating_mul(p);
                }
                let series = cache.factor(p as u64)?.series(2 * top)?;
                e.insert(by_index(&series)?);
            }
            let c = &local[&(p as u64)][e];
            acc = acc.map(|a| a * c);
        }
        coeffs.push(acc);
    }
    Ok(DirichletTrunc { coeffs })
}

/// Zeta factors extracted from the local factors, and the singular ones among them.
struct Structure {
    factors: Vec<ZetaFactor>,
    singular: Vec<usize>,
    s0: Rational64,
    s0_printed: Option<Rational64>,
    order: u32,
}

fn structure(spec: &GlobalSpec) -> Structure {
    let n = spec.n as i64;
    let zf = |a: Rational64, b: Rational64| ZetaFactor { alpha: a, beta: b };
    match spec.kind {
        GlobalKind::Gl => {
            let factors: Vec<ZetaFactor> = (0..n).map(|i| zf(rat(1, 1), rat(i, 1))).collect();
            Structure { factors, singular: vec![(n - 1) as usize], s0: rat(n, 1), s0_printed: None, order: 1 }
        }
        GlobalKind::Symplectic => {
            let l = n / 2;
            let factors: Vec<ZetaFactor> =
                (0..=l).map(|r| zf(rat(l, 1), rat(r * (2 * l + 1 - r) / 2, 1))).collect();
            let s0 = rat(l * (l + 1) / 2 + 1, l);
            Structure { factors, singular: vec![l as usize], s0, s0_printed: None, order: 1 }
        }
        GlobalKind::EvenSplit | GlobalKind::EvenNonsplit => {
            let h = n / 2;
            let factors: Vec<ZetaFactor> = (0..=h).map(|r| zf(rat(n, 2), rat(r * (n - r - 1), 2))).collect();
            if spec.kind == GlobalKind::EvenSplit {
                let s0 = rat(2, n) * (rat(n * (n - 2), 8) + rat(1, 1));
                Structure { factors, singular: vec![(h - 1) as usize, h as usize], s0, s0_printed: None, order: 2 }
            } else {
                let s0 = rat(2, n + 2) * (rat((n - 2) * (n + 4), 8) + rat(1, 1));
                Structure { factors, singular: vec![], s0, s0_printed: None, order: 1 }
            }
        }
        GlobalKind::Odd => {
            let l = (n - 1) / 2;
            let mut factors: Vec<ZetaFactor> = (0..=l).map(|r| zf(rat(n, 1), rat(r * (n - r - 1), 1))).collect();
            // (1 - p^{κ-(n+1)s/2}) with κ = ℓ(n-ℓ)/2
            let kappa = rat(l * (n - l), 2);
            factors.push(zf(rat(n + 1, 2), kappa));
            let s0 = rat(2, n + 1) * (kappa + rat(1, 1));
            let printed = rat(n * n + 1, n + 1);
            Structure { singular: vec![factors.len() - 1], factors, s0, s0_printed: Some(printed), order: 1 }
        }
    }
}

/// `χ(p)` for the discriminant field of an even non-split spec.
fn chi(spec: &GlobalSpec, p: u64) -> Result<i32> {
    Ok(kronecker(fundamental_discriminant(spec.signed_disc())?, p))
}

/// Per-prime correction `c_p(s)`: the local factor times the removed zeta factors, with the
/// inert-prime adjustment for the squared non-split product.
fn correction_at(spec: &GlobalSpec, lf: &LocalFactor, st: &Structure, s: f64) -> Result<f64> {
    let p = lf.p as f64;
    let mut c = lf.eval_f64(s);
    for f in &st.factors {
        c *= f.local(p, s);
    }
    if spec.kind == GlobalKind::EvenNonsplit {
        c *= c;
        c *= match chi(spec, lf.p)? {
            -1 => (1.0 - 1.0 / p) / (1.0 + 1.0 / p),
            0 => 1.0 - 1.0 / p,
            _ => 1.0,
        };
    }
    Ok(c)
}

/// Correction factor at a single prime.
pub fn local_correction(spec: &GlobalSpec, p: u64, s: f64) -> Result<f64> {
    if !is_prime(p) {
        return Err(Error::Usage(format!("{p} is not a prime")));
    }
    let st = structure(spec);
    let lf = FactorCache::new(spec).factor(p)?;
    correction_at(spec, &lf, &st, s)
}

fn corr_abscissa(spec: &GlobalSpec, st: &Structure) -> Result<f64> {
    // numerator majorant: C_d(p) Y^d with Y = p^{-s/2}; converges when d s/2 - b_d > 1
    let mut cache = FactorCache::new(spec);
    match spec.kind {
        GlobalKind::Gl => Ok(f64::NEG_INFINITY),
        GlobalKind::Symplectic | GlobalKind::EvenSplit => {
            let p = if spec.kind == GlobalKind::EvenSplit { good_prime(spec)? } else { 2 };
            let lf = cache.factor(p)?;
            let mut a = f64::NEG_INFINITY;
            for (d, c) in lf.numerator.coeffs().iter().enumerate().skip(1) {
                if let Some(e) = c.max_exp2() {
                    a = a.max(2.0 * (e as f64 / 2.0 + 1.0) / d as f64);
                }
            }
            Ok(a)
        }
        GlobalKind::Odd | GlobalKind::EvenNonsplit => Ok(r2f(st.s0) - 1e-12),
    }
}

fn good_prime(spec: &GlobalSpec) -> Result<u64> {
    primes_up_to(1000)
        .into_iter()
        .find(|&p| spec.discriminant % p as i64 != 0 && spec.local_invariants(p).map(|i| i.f == 1).unwrap_or(false))
        .ok_or_else(|| Error::Internal("no split prime below 1000".into()))
}

fn tail_majorant(lf: &LocalFactor, s: f64, bound: f64) -> f64 {
    let mut tail = 0.0;
    for (d, c) in lf.numerator.coeffs().iter().enumerate().skip(1) {
        let Some(e) = c.max_exp2() else { continue };
        let l1 = c.l1_norm().to_f64().unwrap_or(f64::INFINITY);
        let delta = d as f64 * s / 2.0 - e as f64 / 2.0;
        tail += if delta > 1.0 { l1 * bound.powf(1.0 - delta) / (delta - 1.0) } else { f64::INFINITY };
    }
    tail
}

fn fitted_tail(logs: &[(u64, f64)], bound: f64) -> Option<f64> {
    let peak = |lo: f64, hi: f64| {
        logs.iter()
            .filter(|(p, _)| (*p as f64) > lo && (*p as f64) <= hi)
            .map(|&(p, v)| (p as f64, v.abs()))
            .fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a })
    };
    let (p1, x1) = peak(bound / 4.0, bound / 2.0);
    let (p2, x2) = peak(bound / 2.0, bound);
    if x1 <= 0.0 || x2 <= 0.0 || p1 >= p2 {
        return None;
    }
    // envelope K p^{-δ} through the two peaks, summed over primes beyond the bound
    let delta = (x1 / x2).ln() / (p2 / p1).ln();
    if delta <= 1.0 {
        return Some(f64::INFINITY);
    }
    let k = x2 * p2.powf(delta);
    Some(k * bound.powf(1.0 - delta) / ((delta - 1.0) * bound.ln()))
}

/// `∏_{p ≤ P} c_p(s)` (bad primes always included) and a tail estimate.
pub fn euler_correction(spec: &GlobalSpec, s: Rational64, prime_bound: u64) -> Result<(f64, Option<f64>)> {
    spec.validate()?;
    let st = structure(spec);
    let sf = r2f(s);
    let absc = corr_abscissa(spec, &st)?;
    if sf <= absc {
        return Err(Error::Divergence(format!("s = {s} is not right of the correction abscissa {absc:.6}")));
    }
    if spec.kind == GlobalKind::Gl {
        return Ok((1.0, Some(0.0)));
    }
    let mut primes = primes_up_to(prime_bound);
    for &p in spec.bad_primes.keys() {
        if p > prime_bound {
            primes.push(p);
        }
    }
    let mut cache = FactorCache::new(spec);
    let factors: Vec<LocalFactor> = primes.iter().map(|&p| cache.factor(p)).collect::<Result<_>>()?;
    let logs: Vec<Result<(u64, f64)>> = factors
        .par_iter()
        .map(|lf| correction_at(spec, lf, &st, sf).map(|c| (lf.p, c.ln())))
        .collect();
    let logs: Vec<(u64, f64)> = logs.into_iter().collect::<Result<_>>()?;
    let total: f64 = logs.iter().map(|(_, v)| v).sum();
    let bound = prime_bound as f64;
    let tail = match spec.kind {
        GlobalKind::Symplectic => Some(tail_majorant(&cache.factor(2)?, sf, bound)),
        GlobalKind::EvenSplit if spec.bad_primes.keys().all(|&p| p <= prime_bound) => {
            let lf = cache.factor(good_prime(spec)?)?;
            Some(tail_majorant(&lf, sf, bound))
        }
        _ => fitted_tail(&logs, bound),
    };
    Ok((total.exp(), tail))
}

/// Leading singular data at the right-most pole.
pub fn pole_report(spec: &GlobalSpec) -> Result<PoleReport> {
    spec.validate()?;
    if spec.kind == GlobalKind::EvenNonsplit && spec.n <= 4 {
        return Err(Error::Unsupported(format!(
            "non-split n = {}: the inert-prime pole does not lie right of the zeta poles",
            spec.n
        )));
    }
    let st = structure(spec);
    let s0 = r2f(st.s0);
    let mut zeta_part = 1.0;
    let mut chain = 1.0;
    for (i, f) in st.factors.iter().enumerate() {
        if st.singular.contains(&i) {
            chain /= r2f(f.alpha);
        } else {
            let arg = f.arg(s0);
            if arg <= 1.0 {
                return Err(Error::Internal(format!("zeta argument {arg} at s0 is not > 1")));
            }
            zeta_part *= zeta_real(arg, spec.precision_bits)?.value;
        }
    }
    let (euler_part, tail_bound) = euler_correction(spec, st.s0, spec.prime_bound)?;
    let (leading, leading_literal, l1) = if spec.kind == GlobalKind::EvenNonsplit {
        let l1 = l_one(fundamental_discriminant(spec.signed_disc())?);
        let n = spec.n as f64;
        let res = 2.0 / (n + 2.0) * zeta_part * zeta_part * euler_part / l1;
        (res.sqrt(), (zeta_part * zeta_part * euler_part / l1).sqrt(), Some(l1))
    } else {
        (chain * zeta_part * euler_part, zeta_part * euler_part, None)
    };
    Ok(PoleReport {
        kind: spec.kind,
        s0: st.s0,
        s0_printed: st.s0_printed,
        order: st.order,
        leading,
        leading_literal,
        squared_series: spec.kind == GlobalKind::EvenNonsplit,
        zeta_part,
        euler_part,
        tail_bound,
        l_one: l1,
        prime_bound: spec.prime_bound,
    })
}

/// Main term of `#{Λ : [L:Λ] < X}`.
pub fn asymptotic_count(spec: &GlobalSpec, x: f64) -> Result<f64> {
    let r = pole_report(spec)?;
    Ok(main_term(&r, x))
}

/// Main term from an existing report.
pub fn main_term(r: &PoleReport, x: f64) -> f64 {
    let s0 = r2f(r.s0);
    let base = r.leading / s0 * x.powf(s0);
    match r.kind {
        GlobalKind::EvenSplit => base * x.ln(),
        GlobalKind::EvenNonsplit => base / (PI.sqrt() * x.ln().sqrt()),
        _ => base,
    }
}

/// Exact `Σ_{m<X} c(m)` against the main term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialSum {
    pub x: u64,
    #[serde(with = "crate::exactpoly::decimal")]
    pub exact: BigInt,
    pub asymptotic: f64,
    pub ratio: f64,
}

pub fn partial_sum_check(spec: &GlobalSpec, x: u64) -> Result<PartialSum> {
    if x < 2 {
        return Err(Error::Usage(format!("partial sums need X ≥ 2, got {x}")));
    }
    if spec.prime_bound < x {
        return Err(Error::Usage(format!("prime bound {} is below X = {x}", spec.prime_bound)));
    }
    let d = dirichlet_coeffs(spec, (x - 1) as usize)?;
    let mut exact = BigInt::zero();
    for c in &d.coeffs {
        exact += c.as_ref().ok_or_else(|| Error::Internal("unknown coefficient below X".into()))?;
    }
    let asymptotic = asymptotic_count(spec, x as f64)?;
    let ratio = exact.to_f64().unwrap_or(f64::INFINITY) / asymptotic;
    Ok(PartialSum { x, exact, asymptotic, ratio })
}
