//! The f=1 numerator polynomials `P_ℓ(q,u,T)`, `P_ℓ^{(ε)}` and `W_ℓ^{(ε)}`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::descent::{self, for_each_permutation, Ground, SubsetMask};
use crate::error::{Error, Result};
use crate::exactpoly::{rat_frac, Outer, RatScalar, SeriesPoly, Term, TermTable, Var};

/// Parameters of an ASH polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AshSpec {
    pub ell: u32,
    /// `±1`, or `None` for the trivariate `P_ℓ(q,u,T)`.
    pub eps: Option<i32>,
}

impl AshSpec {
    pub fn new(ell: u32, eps: Option<i32>) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Usage("ℓ must be at least 1".into()));
        }
        if let Some(e) = eps {
            if e != 1 && e != -1 {
                return Err(Error::Usage(format!("ε must be ±1, got {e}")));
            }
        }
        Ok(AshSpec { ell, eps })
    }
}

/// `P_ℓ(q,u;T) = Σ_{K⊂[1,ℓ-1]} w_{ℓ,K}(q) q^{-a(K)} u^{b(K)} T^{#K}`, one term per `K`.
pub fn p_total(ell: u32) -> Result<TermTable> {
    if ell == 0 {
        return Err(Error::Usage("ℓ must be at least 1".into()));
    }
    let mut table = TermTable::new(Var::Q);
    for k in SubsetMask::all(ell, Ground::OneToLm1) {
        table.push(Term {
            w_poly: descent::w_poly(ell, &k)?,
            x_exp2: -2 * descent::stat_a(ell, &k, -1)?,
            u_exp: descent::stat_b(ell, &k),
            t_deg: k.len(),
            b_coef: 0,
        });
    }
    Ok(table)
}

fn w_eps_cache() -> &'static Mutex<HashMap<(u32, i32), SeriesPoly>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, i32), SeriesPoly>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `W_ℓ^{(ε)}(X,T) = P_ℓ^{(ε)}(X^{-1},T)` with `P^{(-1)} = P(q,1,T)` and `P^{(+1)} = P(q,q,qT)`.
pub fn w_eps(ell: u32, eps: i32) -> Result<SeriesPoly> {
    AshSpec::new(ell, Some(eps))?;
    if let Some(w) = w_eps_cache().lock().expect("cache poisoned").get(&(ell, eps)) {
        return Ok(w.clone());
    }
    let table = p_total(ell)?;
    let mut out = SeriesPoly::zero(Outer::T, Var::X);
    for t in &table.terms {
        let extra = if eps == 1 { 2 * (t.u_exp + t.t_deg as i64) } else { 0 };
        let q_poly = t.w_poly.shift(t.x_exp2 + extra);
        out.add_at(t.t_deg as usize, &q_poly.substitute_inverse().retag(Var::X));
    }
    w_eps_cache().lock().expect("cache poisoned").insert((ell, eps), out.clone());
    Ok(out)
}

/// `W_ℓ(X,u,T) = P_ℓ(X^{-1},u,T)` as an [`Mpoly`](crate::exactpoly::Mpoly) over `X`.
pub fn w_trivariate(ell: u32) -> Result<crate::exactpoly::Mpoly> {
    Ok(p_total(ell)?.to_mpoly().invert_x().retag(Var::X))
}

/// `Γ_{ℓ,d}^{(ε)}(j)` by direct enumeration of `S_ℓ`.
pub fn gamma_coeff(ell: u32, d: u32, eps: i32, j: i64) -> Result<u64> {
    Ok(gamma_row(ell, d, eps)?.get(&j).copied().unwrap_or(0))
}

/// All nonzero values `j ↦ Γ_{ℓ,d}^{(ε)}(j)`.
pub fn gamma_row(ell: u32, d: u32, eps: i32) -> Result<std::collections::BTreeMap<i64, u64>> {
    AshSpec::new(ell, Some(eps))?;
    if d < 1 || d + 1 > ell {
        return Err(Error::Usage(format!("need 1 ≤ d ≤ ℓ-1, got d={d}, ℓ={ell}")));
    }
    if ell > descent::STANLEY_CAP {
        return Err(Error::Resource(format!("ℓ={ell} exceeds the enumeration cap")));
    }
    let e = eps as i64;
    let l = ell as i64;
    let mut out = std::collections::BTreeMap::new();
    for_each_permutation(ell, |p| {
        let mut ds = Vec::new();
        for i in 1..p.len() {
            if p[i - 1] > p[i] {
                ds.push(i as i64);
            }
        }
        if ds.len() as u32 != d {
            return;
        }
        let mut inv = 0i64;
        for a in 0..p.len() {
            for b in a + 1..p.len() {
                if p[a] > p[b] {
                    inv += 1;
                }
            }
        }
        let j = l * (l - e) * d as i64 / 2 - ds.iter().map(|v| v * (v - e) / 2).sum::<i64>() - inv;
        *out.entry(j).or_insert(0) += 1;
    });
    Ok(out)
}

/// `(α, β)` with `α = ℓ(d-1)/2 - (d+1)(d+(3ε-5)/2)/6` and `β = ℓ(ℓ-ε)/2 - (d+1)(d-(3ε-7)/2)/6`.
pub fn alpha_beta(ell: u32, d: u32, eps: i32) -> Result<(RatScalar, RatScalar)> {
    AshSpec::new(ell, Some(eps))?;
    if d < 1 || d + 1 > ell {
        return Err(Error::Usage(format!("need 1 ≤ d ≤ ℓ-1, got d={d}, ℓ={ell}")));
    }
    let (l, d, e) = (ell as i64, d as i64, eps as i64);
    let alpha = rat_frac(l * (d - 1), 2) - rat_frac((d + 1) * (2 * d + 3 * e - 5), 12);
    let beta = rat_frac(l * (l - e), 2) - rat_frac((d + 1) * (2 * d - 3 * e + 7), 12);
    Ok((alpha, beta))
}

/// Exponent `c` with `W(X^{-1},T^{-1}) = X^{c} T^{1-ℓ} W(X,T)`.
pub fn fe_exponent_ash(ell: u32, eps: i32) -> Result<RatScalar> {
    AshSpec::new(ell, Some(eps))?;
    let (l, e) = (ell as i64, eps as i64);
    // (ℓ-1)ℓ(ℓ + (1-3ε)/4)/3
    Ok(rat_frac(l * (l - 1), 2) - rat_frac((l - 1) * l * (4 * l + 1 - 3 * e), 12))
}

/// Checks `W_ℓ^{(ε)}(X^{-1},T^{-1}) = X^{c} T^{1-ℓ} W_ℓ^{(ε)}(X,T)` coefficientwise.
pub fn check_functional_eq_ash(ell: u32, eps: i32) -> Result<bool> {
    let w = w_eps(ell, eps)?;
    let c = fe_exponent_ash(ell, eps)?;
    if !c.is_integer() {
        return Ok(false);
    }
    let c2 = 2 * c.to_integer().try_into().unwrap_or(i64::MAX / 4);
    let top = ell as usize - 1;
    if w.degree() != Some(top) {
        return Ok(false);
    }
    Ok((0..=top).all(|d| w.coeff(d).substitute_inverse() == w.coeff(top - d).shift(c2)))
}
