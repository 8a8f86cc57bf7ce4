//! Printed formulas that disagree with the engine, with oracle verdicts where one is feasible.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exactpoly::{HalfLaurent, SeriesPoly, Var};
use crate::latoracle::{self, GramLattice, DEFAULT_CAP};
use crate::localzeta::{local_factor, LocalFactor, LocalInvariants};
use crate::totalash;

/// Which side a brute-force count supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Engine,
    Printed,
    Both,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub p: u64,
    #[serde(rename = "indexExp")]
    pub index_exp: u32,
    #[serde(rename = "normExp")]
    pub norm_exp: u32,
    pub count: u64,
    #[serde(rename = "enginePredicts", with = "crate::exactpoly::decimal")]
    pub engine_predicts: BigInt,
    #[serde(rename = "printedPredicts", with = "crate::exactpoly::decimal")]
    pub printed_predicts: BigInt,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub id: String,
    pub display: String,
    pub printed: String,
    pub engine: String,
    #[serde(default)]
    pub oracle: Option<OracleCheck>,
    /// `true` when the printed form agrees with the engine.
    #[serde(rename = "match")]
    pub matches: bool,
}

fn poly(coeffs: &[i64]) -> HalfLaurent {
    HalfLaurent::from_coeffs(Var::X, coeffs)
}

fn replace_coeff(w: &SeriesPoly, d: usize, c: HalfLaurent) -> SeriesPoly {
    let mut out = w.clone();
    out.add_at(d, &(&c - &w.coeff(d)));
    out
}

fn with_numerator(lf: &LocalFactor, numerator: SeriesPoly) -> LocalFactor {
    LocalFactor { numerator, ..lf.clone() }
}

fn oracle_check(
    g: &GramLattice,
    engine: &LocalFactor,
    printed: &LocalFactor,
    norm_exp: u32,
    index_exp: u32,
) -> Result<OracleCheck> {
    let deg = 2 * index_exp as usize;
    let e = engine.series(deg)?[deg].clone();
    let pr = printed.series(deg)?[deg].clone();
    let counts = latoracle::count_maximal_at(g, engine.p, norm_exp, Some(index_exp), DEFAULT_CAP)?;
    let count = counts.get(&index_exp).copied().unwrap_or(0);
    let c = BigInt::from(count);
    let verdict = match (c == e, c == pr) {
        (true, true) => Verdict::Both,
        (true, false) => Verdict::Engine,
        (false, true) => Verdict::Printed,
        (false, false) => Verdict::Neither,
    };
    Ok(OracleCheck {
        p: engine.p,
        index_exp,
        norm_exp,
        count,
        engine_predicts: e,
        printed_predicts: pr,
        verdict,
    })
}

fn poly_entry(
    id: &str,
    display: &str,
    engine: &LocalFactor,
    printed: SeriesPoly,
    oracle: Option<(GramLattice, u32, u32)>,
) -> Result<LedgerEntry> {
    let printed_lf = with_numerator(engine, printed);
    let oracle = match oracle {
        Some((g, m, k)) => Some(oracle_check(&g, engine, &printed_lf, m, k)?),
        None => None,
    };
    Ok(LedgerEntry {
        id: id.into(),
        display: display.into(),
        printed: printed_lf.numerator.to_string(),
        engine: engine.numerator.to_string(),
        matches: printed_lf.numerator == engine.numerator,
        oracle,
    })
}

fn text_entry(id: &str, display: &str, printed: &str, engine: String, matches: bool) -> LedgerEntry {
    LedgerEntry {
        id: id.into(),
        display: display.into(),
        printed: printed.into(),
        engine,
        oracle: None,
        matches,
    }
}

/// All ledger entries; `with_oracle` adds the brute-force counts (a few seconds).
pub fn typo_ledger(with_oracle: bool) -> Result<Vec<LedgerEntry>> {
    let mut out = Vec::new();

    let k3 = crate::descent::SubsetMask::new(4, crate::descent::Ground::OneToLm1, &[3])?;
    let a3 = crate::descent::stat_a(4, &k3, 1)?;
    out.push(text_entry(
        "descent-table-a-plus",
        "descent statistics table for l=4, entry a^(+1)(K) at K={3}",
        "2",
        format!("{a3}; the complement K'={{1,2}} has 11 and the pair must sum to 14"),
        a3 == 2,
    ));

    // D_3: T^2 term, T = Y^6
    let d3 = local_factor(&LocalInvariants::orthogonal(2, 3, 0, -2, 0, 1)?)?;
    let printed = replace_coeff(&d3.numerator, 12, poly(&[1]));
    out.push(poly_entry(
        "d3-trailing",
        "split D_3 Euler factor, p^{-6s} term",
        &d3,
        printed.clone(),
        with_oracle.then(|| (GramLattice::split_orthogonal(3), 2, 6)),
    )?);

    let go6_split = local_factor(&LocalInvariants::orthogonal(5, 3, 0, -2, 0, 1)?)?;
    out.push(poly_entry(
        "go6-split-trailing",
        "non-split GO(6) Euler factor at p = 1 mod 4, p^{-6s} term (same local type as D_3)",
        &go6_split,
        printed,
        None,
    )?);

    // B_2: Y^10 coefficient [3]_p(1+p^2)
    let b2 = local_factor(&LocalInvariants::orthogonal(2, 2, 1, -1, -1, 2)?)?;
    let printed = replace_coeff(&b2.numerator, 10, &poly(&[1, 1, 1]) * &poly(&[1, 0, 1]));
    out.push(poly_entry(
        "b2-middle",
        "B_2 Euler factor, p^{-5s} coefficient",
        &b2,
        printed,
        with_oracle.then(|| (GramLattice::odd_orthogonal(2), 2, 5)),
    )?);

    // GO(6) inert: Y^12 coefficient (1+p)(1+2p^3)
    let go6 = local_factor(&LocalInvariants::orthogonal(3, 2, 2, 0, -2, 2)?)?;
    let printed = replace_coeff(&go6.numerator, 12, &poly(&[1, 1]) * &poly(&[1, 0, 0, 2]));
    out.push(poly_entry(
        "go6-inert-middle",
        "non-split GO(6) Euler factor at p = 3 mod 4, p^{-6s} coefficient",
        &go6,
        printed,
        with_oracle.then(|| (GramLattice::go6_nonsplit(), 2, 6)),
    )?);

    let mut literal_ok = true;
    for ell in 1..=4 {
        for a2 in [-2, -1, 0] {
            literal_ok &= totalash::check_b0_degeneration_literal(ell, a2)?;
        }
    }
    out.push(text_entry(
        "b0-exponent",
        "B = 0 degeneration of the total polynomial, exponent of X in the r-th factor",
        "l(l+1)/2 - r(r+1)/2 + A(l-r-1)",
        "l(l+1)/2 - r(r+1)/2 + A(l-r)".into(),
        literal_ok,
    ));

    out.push(text_entry(
        "odd-pole",
        "right-most pole of the odd-dimensional counting series",
        "(n^2+1)/(n+1)",
        "2/(n+1) * ((n^2-1)/8 + 1) = (n^2+7)/(4(n+1)); n=3 gives 1, printed gives 5/2".into(),
        false,
    ));

    let mut literal_holds = true;
    let mut corrected_holds = true;
    for m in [1, 2, 3, 4, 6] {
        literal_holds &= latoracle::crosscheck_symplectic(2, m)?.holds;
        corrected_holds &= latoracle::crosscheck_corrected(2, m)?.holds;
    }
    out.push(text_entry(
        "crosscheck-weights",
        "elementary-divisor identity for maximal sublattices of index m^l",
        "d^{l(l-1)/2} prod_j delta_j^{j-l}",
        format!("d prod_j delta_j^{{j+1}} (holds for l=2, m in 1,2,3,4,6: {corrected_holds})"),
        literal_holds,
    ));

    out.push(text_entry(
        "split-euler-variable",
        "Euler product of the split even case, second argument of W^(+1)",
        "p^{-ls-1}",
        "p^{-ls}; the D_2 example factor 1+p^{-2s} needs T = p^{-2s}".into(),
        false,
    ));

    out.push(text_entry(
        "odd-zeta-shifts",
        "zeta factors of the odd-dimensional product",
        "zeta(ns - r(n-r+1))",
        "zeta(ns - r(n-r-1)); matches the B_1 and B_2 examples".into(),
        false,
    ));

    Ok(out)
}
