//! The f=2 machinery: `𝒰_{ℓ,J}`, the parity sums `U^•_{ℓ,B}`, `P_{ℓ,I}`, and the
//! polynomials `W^{(0)}`, `W^{(1)}`, `W^{total}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ash;
use crate::descent::{self, Ground, SubsetMask};
use crate::error::{Error, Result};
use crate::exactpoly::{
    format_exp2, HalfLaurent, Mono, Mpoly, Outer, RatScalar, SeriesPoly, Term, TermTable, Var,
};

/// `(ℓ, A, B)` with `A` and `B` stored doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TotalAshSpec {
    pub ell: u32,
    pub a2: i64,
    pub b2: i64,
}

/// Rows `(A, B)` (doubled) of the classification table with `f = 2`.
pub const TABLE_AB: [(i64, i64); 6] = [(-1, -1), (-1, 1), (0, -2), (0, 2), (1, -1), (1, 1)];

impl TotalAshSpec {
    pub fn new(ell: u32, a2: i64, b2: i64) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Usage("ℓ must be at least 1".into()));
        }
        let in_table = TABLE_AB.contains(&(a2, b2));
        if !in_table && !(b2 == 0 && a2 >= -2) {
            return Err(Error::Usage(format!(
                "(A,B)=({},{}) is neither a table row nor a B=0 degeneration",
                format_exp2(a2),
                format_exp2(b2)
            )));
        }
        Ok(TotalAshSpec { ell, a2, b2 })
    }

    /// `n = 2(ℓ + A + 1)`.
    pub fn n(&self) -> i64 {
        2 * self.ell as i64 + self.a2 + 2
    }
}

fn a_minus(ell: u32, s: &SubsetMask) -> i64 {
    descent::stat_a(ell, s, -1).expect("ε=-1 is valid")
}

/// `𝒰_{ℓ,J}(X,u,T) = u^{b(J)} X^{a(J)} Σ_{I_0, I_1} w_{ℓ,I_0∪I_1}(X^{-1}) (X^{a(I_1)} u^{b(I_1)} T^{#I_1})^2`.
pub fn script_u(ell: u32, j: &SubsetMask) -> Result<TermTable> {
    if j.ground() != Ground::ZeroToLm1 || j.ell() != ell {
        return Err(Error::Usage("J must be a subset of [0,ℓ-1]".into()));
    }
    let inner = Ground::OneToLm1;
    let inner_mask = SubsetMask::full(ell, inner).bits();
    let j_in = j.bits() & inner_mask;
    let j_out = inner_mask & !j.bits();
    let (aj, bj) = (a_minus(ell, j), descent::stat_b(ell, j));
    let mut table = TermTable::new(Var::X);
    for i0 in submasks(j_in) {
        for i1 in submasks(j_out) {
            let k = SubsetMask::from_bits(ell, inner, i0 | i1)?;
            let s1 = SubsetMask::from_bits(ell, inner, i1)?;
            let w = descent::w_poly(ell, &k)?.substitute_inverse().retag(Var::X);
            table.push(Term {
                w_poly: w,
                x_exp2: 2 * (aj + 2 * a_minus(ell, &s1)),
                u_exp: bj + 2 * descent::stat_b(ell, &s1),
                t_deg: 2 * s1.len(),
                b_coef: 0,
            });
        }
    }
    Ok(table)
}

fn submasks(mask: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut s = mask;
    loop {
        out.push(s);
        if s == 0 {
            break;
        }
        s = (s - 1) & mask;
    }
    out.reverse();
    out
}

/// Parity of the `T`-degree selected from a `U^•` sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    #[serde(rename = "even")]
    Even,
    #[serde(rename = "odd")]
    Odd,
}

/// `U^•_{ℓ,B}` as a term table with `B` symbolic (recorded in `bCoef`).
pub fn u_parity_table(ell: u32, parity: Parity) -> Result<TermTable> {
    let mut table = TermTable::new(Var::X);
    for j in SubsetMask::all(ell, Ground::ZeroToLm1) {
        if (j.len() % 2 == 1) != (parity == Parity::Odd) {
            continue;
        }
        let br = descent::bracket(&j);
        for t in script_u(ell, &j)?.terms {
            table.push(Term { t_deg: t.t_deg + j.len(), b_coef: t.b_coef + br, ..t });
        }
    }
    Ok(table)
}

/// `U^•_{ℓ,B}(X,u,T)` collected, with `B` symbolic.
pub fn u_parity(ell: u32, parity: Parity) -> Result<Mpoly> {
    Ok(u_parity_table(ell, parity)?.to_mpoly())
}

/// All `P_{ℓ,I}` at once, keyed by the mask of `I ⊂ [1,ℓ]`.
pub fn p_ell_all(ell: u32) -> Result<BTreeMap<u64, TermTable>> {
    if ell == 0 {
        return Err(Error::Usage("ℓ must be at least 1".into()));
    }
    let mut out: BTreeMap<u64, TermTable> = SubsetMask::all(ell, Ground::OneToL)
        .map(|i| (i.bits(), TermTable::new(Var::Q)))
        .collect();
    for k in SubsetMask::all(ell, Ground::OneToLm1) {
        let w = descent::w_poly(ell, &k)?;
        let (ak, bk) = (a_minus(ell, &k), descent::stat_b(ell, &k));
        for h in SubsetMask::all(ell, Ground::ZeroToLm1) {
            let d = descent::delta_set(&h, &k)?;
            let entry = out.get_mut(&d.bits()).expect("every I ⊂ [1,ℓ] is a key");
            entry.push(Term {
                w_poly: w.clone(),
                x_exp2: -2 * (ak + a_minus(ell, &h)),
                u_exp: bk + descent::stat_b(ell, &h),
                t_deg: k.len() + h.len(),
                b_coef: 0,
            });
        }
    }
    Ok(out)
}

/// `P_{ℓ,I}(q,u;T) = Σ_{𝔡(H,K)=I} w_{ℓ,K}(q) q^{-a(K)-a(H)} u^{b(H)+b(K)} T^{#H+#K}`.
pub fn p_ell_i(ell: u32, i: &SubsetMask) -> Result<TermTable> {
    if i.ground() != Ground::OneToL || i.ell() != ell {
        return Err(Error::Usage("I must be a subset of [1,ℓ]".into()));
    }
    Ok(p_ell_all(ell)?.remove(&i.bits()).expect("key present"))
}

/// `U^•_{ℓ,B}` through the `P_{ℓ,I}` route: parity part of `Σ_I X^{B#I} P_{ℓ,I}(X^{-1},u,T)`.
pub fn u_parity_via_p(ell: u32, parity: Parity) -> Result<Mpoly> {
    let mut acc = Mpoly::zero(Var::X);
    for (bits, table) in p_ell_all(ell)? {
        let size = bits.count_ones() as i64;
        let m = table.to_mpoly().invert_x().retag(Var::X).shift(0, Mono { t: 0, u: 0, b: size });
        acc.add_assign(&m);
    }
    Ok(acc.parity_part(parity == Parity::Odd))
}

fn assemble(ue: &Mpoly, uo: &Mpoly, spec: &TotalAshSpec) -> Result<(SeriesPoly, SeriesPoly)> {
    let (a2, b2) = (spec.a2, spec.b2);
    let w0 = ue.specialize(a2, b2)?.add(&uo.specialize(a2, b2)?.shift_outer(1));
    let w1 = ue.specialize(a2, -b2)?.shift_outer(1).add(&uo.specialize(a2, -b2)?);
    Ok((w0, w1))
}

/// `(W^{(0)}_{ℓ,A,B}(X,T), W^{(1)}_{ℓ,A,B}(X,T))`.
pub fn w0_w1(spec: &TotalAshSpec) -> Result<(SeriesPoly, SeriesPoly)> {
    let ue = u_parity(spec.ell, Parity::Even)?;
    let uo = u_parity(spec.ell, Parity::Odd)?;
    assemble(&ue, &uo, spec)
}

fn combine_total(spec: &TotalAshSpec, w0: &SeriesPoly, w1: &SeriesPoly) -> Result<SeriesPoly> {
    let n = spec.n();
    if n <= 0 {
        return Err(Error::Usage(format!("n = 2(ℓ+A+1) = {n} must be positive")));
    }
    let n = n as usize;
    let mut out = w0.stretch_outer(n).with_outer(Outer::Y);
    let shifted = w1.stretch_outer(n);
    for (d, c) in shifted.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let deg = d as i64 - spec.b2;
        if deg < 0 {
            return Err(Error::Internal(format!("negative Y-degree {deg} in W^total")));
        }
        out.add_at(deg as usize, c);
    }
    Ok(out)
}

/// `W^{total}_{ℓ,A,B}(X,Y) = W^{(0)}(X,Y^n) + W^{(1)}(X,Y^n) Y^{-2B}`.
pub fn w_total(spec: &TotalAshSpec) -> Result<SeriesPoly> {
    let (w0, w1) = w0_w1(spec)?;
    combine_total(spec, &w0, &w1)
}

/// `W^{total}` assembled from the `P_{ℓ,I}` route.
pub fn w_total_via_p(spec: &TotalAshSpec) -> Result<SeriesPoly> {
    let ue = u_parity_via_p(spec.ell, Parity::Even)?;
    let uo = u_parity_via_p(spec.ell, Parity::Odd)?;
    let (w0, w1) = assemble(&ue, &uo, spec)?;
    combine_total(spec, &w0, &w1)
}

/// Checks `U^{even}_{ℓ,B}(X^{-1},u^{-1},T^{-1}) = X^{-2ℓ(ℓ²-1)/3-(B+1)ℓ} u^{-(ℓ-1)²} T^{1-2ℓ} U^{odd}_{ℓ,B}(X,u,T)`
/// with `B` symbolic, and additionally at `B = b2/2`.
pub fn check_fe_total(ell: u32, b2: i64) -> Result<bool> {
    let ue = u_parity(ell, Parity::Even)?;
    let uo = u_parity(ell, Parity::Odd)?;
    let l = ell as i64;
    let x2 = 2 * (-2 * l * (l * l - 1) / 3 - l);
    let lhs = ue.invert_all();
    let rhs = uo.shift(x2, Mono { t: 1 - 2 * l, u: -(l - 1) * (l - 1), b: -l });
    Ok(lhs == rhs && lhs.fix_b(b2) == rhs.fix_b(b2))
}

/// Checks `P_{ℓ,I} = T^{#I^♭} 𝒰_{ℓ,I^♭}(q^{-1},u,T)` for every `I`.
pub fn check_p_vs_script_u(ell: u32) -> Result<bool> {
    for (bits, table) in p_ell_all(ell)? {
        let i = SubsetMask::from_bits(ell, Ground::OneToL, bits)?;
        let fl = descent::flat(&i)?;
        let u = script_u(ell, &fl)?
            .to_mpoly()
            .invert_x()
            .retag(Var::Q)
            .shift(0, Mono { t: fl.len() as i64, u: 0, b: 0 });
        if u != table.to_mpoly() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks `P_{ℓ,[1,ℓ]-I}(q^{-1},u^{-1},T^{-1}) = q^{2ℓ(ℓ-1)(ℓ+1)/3+ℓ} u^{-(ℓ-1)²} T^{1-2ℓ} P_{ℓ,I}(q,u,T)`.
pub fn check_p_functional_eq(ell: u32) -> Result<bool> {
    let all = p_ell_all(ell)?;
    let l = ell as i64;
    let full = SubsetMask::full(ell, Ground::OneToL).bits();
    let x2 = 2 * (2 * l * (l - 1) * (l + 1) / 3 + l);
    for (bits, table) in &all {
        let lhs = all[&(full & !bits)].to_mpoly().invert_all();
        let rhs = table.to_mpoly().shift(x2, Mono { t: 1 - 2 * l, u: -(l - 1) * (l - 1), b: 0 });
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks `Σ_I P_{ℓ,I} = ∏_{r=0}^{ℓ-1} (1 + q^{r(r+1)/2-ℓ(ℓ+1)/2} u^{ℓ-r-1} T) · P_ℓ(q,u,T)`.
pub fn check_p_sum(ell: u32) -> Result<bool> {
    let mut lhs = Mpoly::zero(Var::Q);
    for table in p_ell_all(ell)?.values() {
        lhs.add_assign(&table.to_mpoly());
    }
    let l = ell as i64;
    let mut rhs = ash::p_total(ell)?.to_mpoly();
    for r in 0..l {
        let mut f = Mpoly::one(Var::Q);
        f.add_term(Mono { t: 1, u: l - r - 1, b: 0 }, &HalfLaurent::power(Var::Q, r * (r + 1) - l * (l + 1)));
        rhs = rhs.mul(&f);
    }
    Ok(lhs == rhs)
}

/// Exponent (doubled) of `X` in the `r`-th factor of the `B = 0` product.
///
/// `literal` selects `A(ℓ-r-1)` as printed; otherwise `A(ℓ-r)`, which is what the
/// sum identity for `P_{ℓ,I}` yields.
pub fn b0_factor_exp2(ell: u32, a2: i64, r: u32, literal: bool) -> i64 {
    let (l, r) = (ell as i64, r as i64);
    let k = if literal { l - r - 1 } else { l - r };
    l * (l + 1) - r * (r + 1) + a2 * k
}

/// Right-hand side `∏_{r=0}^{ℓ}(1 + X^{e_r} Y^n) W_ℓ(X, X^A, X^A Y^n)`.
pub fn b0_product(ell: u32, a2: i64, literal: bool) -> Result<SeriesPoly> {
    let spec = TotalAshSpec::new(ell, a2, 0)?;
    let n = spec.n() as usize;
    let w = ash::w_trivariate(ell)?.specialize(a2, 0)?.stretch_outer(n).with_outer(Outer::Y);
    let mut acc = w;
    for r in 0..=ell {
        let mut f = SeriesPoly::one(Outer::Y, Var::X);
        f.add_at(n, &HalfLaurent::power(Var::X, b0_factor_exp2(ell, a2, r, literal)));
        acc = acc.mul(&f);
    }
    Ok(acc)
}

/// Checks the `B = 0` degeneration of `W^{total}` against [`b0_product`] (derived exponent).
pub fn check_b0_degeneration(ell: u32, a2: i64) -> Result<bool> {
    Ok(w_total(&TotalAshSpec::new(ell, a2, 0)?)? == b0_product(ell, a2, false)?)
}

/// Same check with the exponent exactly as printed.
pub fn check_b0_degeneration_literal(ell: u32, a2: i64) -> Result<bool> {
    Ok(w_total(&TotalAshSpec::new(ell, a2, 0)?)? == b0_product(ell, a2, true)?)
}

/// The lowest nonzero `Y`-degree above 0 and the top `X`-exponent (doubled) of its coefficient.
pub fn second_lowest_term(w: &SeriesPoly) -> Option<(usize, i64)> {
    w.coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, c)| !c.is_zero())
        .and_then(|(d, c)| c.max_exp2().map(|e| (d, e)))
}

/// `W^{total}` evaluated at `X = p` as rational coefficients in `Y`.
pub fn w_total_at(spec: &TotalAshSpec, p: u64) -> Result<Vec<RatScalar>> {
    w_total(spec)?.specialize_inner(&p.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(coeffs: &[i64]) -> HalfLaurent {
        HalfLaurent::from_coeffs(Var::X, coeffs)
    }

    fn j(ell: u32, els: &[u32]) -> SubsetMask {
        SubsetMask::new(ell, Ground::ZeroToLm1, els).unwrap()
    }

    #[test]
    fn script_u_examples() {
        assert_eq!(script_u(1, &j(1, &[])).unwrap().to_mpoly(), Mpoly::one(Var::X));
        let u = script_u(1, &j(1, &[0])).unwrap().to_mpoly();
        assert_eq!(u, Mpoly::term(x(&[0, 1]), Mono { t: 0, u: 0, b: 0 }));
        let u = script_u(2, &j(2, &[])).unwrap().to_mpoly();
        let mut expect = Mpoly::one(Var::X);
        expect.add_term(Mono { t: 2, u: 0, b: 0 }, &x(&[0, 0, 0, 1]));
        assert_eq!(u, expect);
    }

    #[test]
    fn u_parity_ell_one() {
        assert_eq!(u_parity(1, Parity::Even).unwrap(), Mpoly::one(Var::X));
        assert_eq!(u_parity(1, Parity::Odd).unwrap(), Mpoly::term(x(&[0, 1]), Mono { t: 1, u: 0, b: 1 }));
    }

    #[test]
    fn w_total_b1() {
        let spec = TotalAshSpec::new(1, -1, -1).unwrap();
        let (w0, w1) = w0_w1(&spec).unwrap();
        assert_eq!(w0.coeffs(), &[x(&[1]), x(&[]), x(&[1])]);
        assert_eq!(w1.coeffs(), &[x(&[]), x(&[1, 1])]);
        let wt = w_total(&spec).unwrap();
        assert_eq!(wt.coeffs(), &[x(&[1]), x(&[]), x(&[]), x(&[]), x(&[1, 1]), x(&[]), x(&[1])]);
    }

    #[test]
    fn small_identities() {
        assert!(check_fe_total(1, -1).unwrap());
        assert!(check_fe_total(2, -2).unwrap());
        assert!(check_p_vs_script_u(2).unwrap());
        assert!(check_p_functional_eq(2).unwrap());
        assert!(check_p_sum(2).unwrap());
        assert!(check_b0_degeneration(1, -2).unwrap());
        assert!(check_b0_degeneration(2, 0).unwrap());
    }

    #[test]
    fn two_routes_agree() {
        for &(a2, b2) in &TABLE_AB {
            let spec = TotalAshSpec::new(2, a2, b2).unwrap();
            assert_eq!(w_total(&spec).unwrap(), w_total_via_p(&spec).unwrap());
        }
    }
}
