//! Closed-form local Euler factors of the maximal-lattice counting series.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::ash;
use crate::error::{Error, Result};
use crate::exactpoly::{format_exp2, Outer, RatScalar, SeriesPoly, Var};
use crate::totalash::{self, TotalAshSpec, TABLE_AB};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalKind {
    Orthogonal,
    Symplectic,
}

/// Local data at `p`: Witt index, anisotropic dimension, `(A, B)` doubled, and `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalInvariants {
    pub p: u64,
    pub ell: u32,
    pub n0: u32,
    pub a2: i64,
    pub b2: i64,
    pub f: u8,
    pub kind: LocalKind,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl LocalInvariants {
    pub fn orthogonal(p: u64, ell: u32, n0: u32, a2: i64, b2: i64, f: u8) -> Result<Self> {
        let inv = LocalInvariants { p, ell, n0, a2, b2, f, kind: LocalKind::Orthogonal };
        inv.validate()?;
        Ok(inv)
    }

    pub fn symplectic(p: u64, ell: u32) -> Result<Self> {
        let inv = LocalInvariants { p, ell, n0: 0, a2: 0, b2: 0, f: 1, kind: LocalKind::Symplectic };
        inv.validate()?;
        Ok(inv)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::Usage(format!("{} is not a prime", self.p)));
        }
        match self.kind {
            LocalKind::Symplectic => {
                if self.n0 != 0 || self.a2 != 0 || self.b2 != 0 || self.f != 1 {
                    return Err(Error::Usage("symplectic data needs n0=0, A=0, B=0, f=1".into()));
                }
                if self.ell == 0 {
                    return Err(Error::Usage("symplectic ℓ must be at least 1".into()));
                }
            }
            LocalKind::Orthogonal => {
                if self.n() == 0 {
                    return Err(Error::Usage("orthogonal data needs dimension at least 1".into()));
                }
                if self.a2 != self.n0 as i64 - 2 {
                    return Err(Error::Usage(format!(
                        "A must equal n0/2-1 = {}, got {}",
                        format_exp2(self.n0 as i64 - 2),
                        format_exp2(self.a2)
                    )));
                }
                match self.f {
                    1 => {
                        if self.b2 != 0 {
                            return Err(Error::Usage("f=1 requires B=0".into()));
                        }
                        if self.n0 % 2 == 1 || self.n0 > 4 {
                            return Err(Error::Usage(format!("f=1 needs n0 ∈ {{0,2,4}}, got {}", self.n0)));
                        }
                    }
                    2 => {
                        if !TABLE_AB.contains(&(self.a2, self.b2)) {
                            return Err(Error::Usage(format!(
                                "(A,B)=({},{}) is not a row of the f=2 table",
                                format_exp2(self.a2),
                                format_exp2(self.b2)
                            )));
                        }
                    }
                    f => return Err(Error::Usage(format!("f must be 1 or 2, got {f}"))),
                }
            }
        }
        Ok(())
    }

    /// Dimension `n = 2ℓ + n0`.
    pub fn n(&self) -> u32 {
        2 * self.ell + self.n0
    }

    /// `Y`-degree `f·n` of `p^{-fns/2}` with `Y = p^{-s/2}`.
    pub fn denominator_y_degree(&self) -> usize {
        self.f as usize * self.n() as usize
    }
}

/// How `(-1)^{n/2} D_L` sits in `Z_p` at a good prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscClass {
    Square,
    Nonsquare,
    OddN,
}

/// Local invariants at a prime not dividing the discriminant.
pub fn classify_unramified(p: u64, n: u32, class: DiscClass) -> Result<LocalInvariants> {
    if n < 2 {
        return Err(Error::Usage(format!("dimension must be at least 2, got {n}")));
    }
    match (n % 2, class) {
        (1, DiscClass::OddN) => LocalInvariants::orthogonal(p, (n - 1) / 2, 1, -1, -1, 2),
        (0, DiscClass::Square) => LocalInvariants::orthogonal(p, n / 2, 0, -2, 0, 1),
        (0, DiscClass::Nonsquare) => LocalInvariants::orthogonal(p, n / 2 - 1, 2, 0, -2, 2),
        _ => Err(Error::Usage(format!("class {class:?} does not fit dimension {n}"))),
    }
}

/// `e_r` for `r ∈ [0,ℓ]`; the factors are `1 - p^{e_r} Y^{fn}`.
pub fn denominator_exponents(inv: &LocalInvariants) -> Vec<i64> {
    let l = inv.ell as i64;
    let f = inv.f as i64;
    (0..=l)
        .map(|r| match inv.kind {
            LocalKind::Symplectic => r * (2 * l + 1 - r) / 2,
            // f·r·(A+ℓ) - f·r(r-1)/2 with A doubled
            LocalKind::Orthogonal => (f * r * (inv.a2 + 2 * l) - f * r * (r - 1)) / 2,
        })
        .collect()
}

/// `N(Y) / ∏_r (1 - p^{e_r} Y^{D})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFactor {
    pub p: u64,
    /// Numerator in `Y = p^{-s/2}` with `X` kept symbolic; set `X = p` to evaluate.
    pub numerator: SeriesPoly,
    #[serde(rename = "denominatorExponents")]
    pub denominator_exponents: Vec<i64>,
    #[serde(rename = "denominatorYDegree")]
    pub denominator_y_degree: usize,
}

impl LocalFactor {
    /// Numerator coefficients at `X = p`.
    pub fn numerator_values(&self) -> Result<Vec<RatScalar>> {
        self.numerator.specialize_inner(&BigInt::from(self.p))
    }

    /// Power series in `Y` up to degree `m`, exact.
    pub fn series(&self, m: usize) -> Result<Vec<BigInt>> {
        let mut c: Vec<RatScalar> = vec![RatScalar::zero(); m + 1];
        for (d, v) in self.numerator_values()?.into_iter().enumerate() {
            if d <= m {
                c[d] = v;
            }
        }
        let p = BigInt::from(self.p);
        let step = self.denominator_y_degree;
        for &e in &self.denominator_exponents {
            let pe = RatScalar::from_integer(num_traits::pow(p.clone(), e.max(0) as usize));
            let pe = if e < 0 { pe.recip() } else { pe };
            for k in step..=m {
                let add = &c[k - step] * &pe;
                c[k] += add;
            }
        }
        c.into_iter()
            .enumerate()
            .map(|(d, v)| {
                if v.is_integer() {
                    Ok(v.to_integer())
                } else {
                    Err(Error::Internal(format!("non-integral series coefficient {v} at Y^{d}")))
                }
            })
            .collect()
    }

    /// Value at real `s` in floating point.
    pub fn eval_f64(&self, s: f64) -> f64 {
        let p = self.p as f64;
        let y = p.powf(-s / 2.0);
        let num = self.numerator.eval_f64(p, y);
        let yd = y.powi(self.denominator_y_degree as i32);
        let den: f64 = self.denominator_exponents.iter().map(|&e| 1.0 - p.powi(e as i32) * yd).product();
        num / den
    }

    pub fn to_latex(&self) -> String {
        let den: Vec<String> = self
            .denominator_exponents
            .iter()
            .map(|&e| match e {
                0 => format!("(1-Y^{{{}}})", self.denominator_y_degree),
                e => format!("(1-p^{{{e}}}Y^{{{}}})", self.denominator_y_degree),
            })
            .collect();
        let num = self.numerator.to_latex().replace('X', "p");
        format!("\\frac{{{num}}}{{{}}}", den.join(""))
    }
}

/// Local factor through the `f = 2` route for any `(A, B)` accepted by [`TotalAshSpec`],
/// including `B = 0`.
pub fn local_factor_via_total(p: u64, spec: &TotalAshSpec) -> Result<LocalFactor> {
    let inv = LocalInvariants { p, ell: spec.ell, n0: (spec.a2 + 2) as u32, a2: spec.a2, b2: spec.b2, f: 2, kind: LocalKind::Orthogonal };
    Ok(LocalFactor {
        p,
        numerator: totalash::w_total(spec)?,
        denominator_exponents: denominator_exponents(&inv),
        denominator_y_degree: 2 * spec.n() as usize,
    })
}

/// `ζ_{β_p,L_p}(s)` as a rational function of `Y = p^{-s/2}`.
pub fn local_factor(inv: &LocalInvariants) -> Result<LocalFactor> {
    inv.validate()?;
    let p = inv.p;
    let exps = denominator_exponents(inv);
    let dy = inv.denominator_y_degree();
    let numerator = match (inv.kind, inv.f, inv.ell) {
        (LocalKind::Orthogonal, 2, 0) => {
            return Err(Error::Unsupported("ℓ=0 with f=2 has no closed form".into()));
        }
        (LocalKind::Orthogonal, 1, 0) => SeriesPoly::one(Outer::Y, Var::X),
        (LocalKind::Orthogonal, 1, ell) => ash::w_trivariate(ell)?
            .specialize(inv.a2, 0)?
            .stretch_outer(inv.n() as usize)
            .with_outer(Outer::Y),
        (LocalKind::Orthogonal, _, ell) => {
            return local_factor_via_total(p, &TotalAshSpec::new(ell, inv.a2, inv.b2)?);
        }
        (LocalKind::Symplectic, _, ell) => {
            ash::w_eps(ell, -1)?.stretch_outer(dy).with_outer(Outer::Y)
        }
    };
    Ok(LocalFactor { p, numerator, denominator_exponents: exps, denominator_y_degree: dy })
}

/// `∏_{i=0}^{n-1} (1 - p^i Y^2)^{-1}`: all sublattices of `Z_p^n` by index.
pub fn gl_local_factor(p: u64, n: u32) -> Result<LocalFactor> {
    if !is_prime(p) {
        return Err(Error::Usage(format!("{p} is not a prime")));
    }
    if n == 0 {
        return Err(Error::Usage("dimension must be positive".into()));
    }
    Ok(LocalFactor {
        p,
        numerator: SeriesPoly::one(Outer::Y, Var::X),
        denominator_exponents: (0..n as i64).collect(),
        denominator_y_degree: 2,
    })
}

/// Expansion of [`local_factor`] up to `Y`-degree `m`; entry `d` counts maximal sublattices
/// of index `p^{d/2}`.
pub fn local_series_coeffs(inv: &LocalInvariants, m: usize) -> Result<Vec<BigInt>> {
    local_factor(inv)?.series(m)
}

/// Coefficient list indexed by `k` with index `p^k`; fails if an odd `Y`-degree is nonzero.
pub fn by_index(series: &[BigInt]) -> Result<Vec<BigInt>> {
    if let Some((d, _)) = series.iter().enumerate().find(|(d, c)| d % 2 == 1 && !c.is_zero()) {
        return Err(Error::Internal(format!("nonzero coefficient at odd Y-degree {d}")));
    }
    Ok(series.iter().step_by(2).cloned().collect())
}

/// Numerator `Y`-polynomial coefficients at `X = p`, returned as integers when possible.
pub fn numerator_integers(lf: &LocalFactor) -> Result<Vec<BigInt>> {
    lf.numerator_values()?
        .into_iter()
        .map(|v| {
            if v.is_integer() {
                Ok(v.to_integer())
            } else {
                Err(Error::Precision(format!("numerator coefficient {v} is not integral")))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn classification_examples() {
        let i = classify_unramified(5, 6, DiscClass::Square).unwrap();
        assert_eq!((i.ell, i.n0, i.a2, i.b2, i.f), (3, 0, -2, 0, 1));
        let i = classify_unramified(7, 6, DiscClass::Nonsquare).unwrap();
        assert_eq!((i.ell, i.n0, i.a2, i.b2, i.f), (2, 2, 0, -2, 2));
        let i = classify_unramified(3, 5, DiscClass::OddN).unwrap();
        assert_eq!((i.ell, i.n0, i.a2, i.b2, i.f), (2, 1, -1, -1, 2));
    }

    #[test]
    fn denominator_examples() {
        let b1 = LocalInvariants::orthogonal(2, 1, 1, -1, -1, 2).unwrap();
        assert_eq!(denominator_exponents(&b1), vec![0, 1]);
        let c2 = LocalInvariants::symplectic(2, 2).unwrap();
        assert_eq!(denominator_exponents(&c2), vec![0, 2, 3]);
        let d3 = LocalInvariants::orthogonal(2, 3, 0, -2, 0, 1).unwrap();
        assert_eq!(denominator_exponents(&d3), vec![0, 2, 3, 3]);
    }

    #[test]
    fn series_examples() {
        let d2 = LocalInvariants::orthogonal(2, 2, 0, -2, 0, 1).unwrap();
        let s = local_series_coeffs(&d2, 4).unwrap();
        assert_eq!(s, ints(&[1, 0, 0, 0, 6]));
        let c2 = LocalInvariants::symplectic(2, 2).unwrap();
        assert_eq!(local_series_coeffs(&c2, 4).unwrap()[4], BigInt::from(15));
        let b1 = LocalInvariants::orthogonal(2, 1, 1, -1, -1, 2).unwrap();
        let s = local_series_coeffs(&b1, 6).unwrap();
        assert_eq!(s, ints(&[1, 0, 0, 0, 3, 0, 4]));
    }

    #[test]
    fn anisotropic_f1() {
        let inv = LocalInvariants::orthogonal(3, 0, 2, 0, 0, 1).unwrap();
        assert_eq!(local_series_coeffs(&inv, 4).unwrap(), ints(&[1, 0, 1, 0, 1]));
        let bad = LocalInvariants { p: 3, ell: 0, n0: 1, a2: -1, b2: -1, f: 2, kind: LocalKind::Orthogonal };
        assert!(matches!(local_factor(&bad), Err(Error::Unsupported(_))));
    }

    #[test]
    fn gl_matches_divisor_sums() {
        let s = gl_local_factor(2, 2).unwrap().series(6).unwrap();
        assert_eq!(by_index(&s).unwrap(), ints(&[1, 3, 7, 15]));
    }
}
