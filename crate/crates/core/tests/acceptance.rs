//! One pass/fail line per acceptance criterion.
//!
//! Criteria 1, 4, 7 and 8 compare against printed formulas that the brute-force oracle and the
//! exact algebra both contradict; they are evaluated as printed and expected to fail.

use std::io::Write as _;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::Rational64;

use maxlat::descent::{self, Ground, SubsetMask};
use maxlat::exactpoly::{HalfLaurent, Mono, Mpoly, Outer, SeriesPoly, Var};
use maxlat::globalzeta::{dirichlet_coeffs, euler_correction, pole_report, GlobalSpec};
use maxlat::latoracle::{self, count_maximal_at, enum_sublattices, GramLattice, DEFAULT_CAP};
use maxlat::localzeta::{local_factor, LocalFactor, LocalInvariants};
use maxlat::totalash::{self, u_parity, Parity, TABLE_AB};
use maxlat::{ash, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

/// `Σ c_i X^{e_i}` from `(e, c)` pairs.
fn xp(terms: &[(i64, i64)]) -> HalfLaurent {
    HalfLaurent::from_terms(Var::X, terms.iter().map(|&(e, c)| (2 * e, maxlat::exactpoly::rat(c))))
}

fn q(coeffs: &[i64]) -> HalfLaurent {
    HalfLaurent::from_coeffs(Var::Q, coeffs)
}

fn y_poly(terms: &[(usize, HalfLaurent)]) -> SeriesPoly {
    let mut s = SeriesPoly::zero(Outer::Y, Var::X);
    for (d, c) in terms {
        s.add_at(*d, c);
    }
    s
}

// ---- criterion 1

fn criterion_1() -> Result<Outcome> {
    // (ℓ, K, a^{(-1)}, b, a^{(+1)}, w)
    let rows: Vec<(u32, Vec<u32>, i64, i64, i64, HalfLaurent)> = vec![
        (2, vec![], 0, 0, 0, q(&[1])),
        (2, vec![1], 2, 0, 1, q(&[0, 1])),
        (3, vec![], 0, 0, 0, q(&[1])),
        (3, vec![1], 5, 1, 3, q(&[0, 1, 1])),
        (3, vec![2], 3, 0, 2, q(&[0, 1, 1])),
        (3, vec![1, 2], 8, 1, 5, q(&[0, 0, 0, 1])),
        (4, vec![], 0, 0, 0, q(&[1])),
        (4, vec![1], 9, 2, 6, q(&[0, 1, 1, 1])),
        (4, vec![2], 7, 1, 5, q(&[0, 1, 2, 1, 1])),
        (4, vec![3], 4, 0, 2, q(&[0, 1, 1, 1])),
        (4, vec![1, 2], 16, 3, 11, q(&[0, 0, 0, 1, 1, 1])),
        (4, vec![1, 3], 13, 2, 9, q(&[0, 0, 1, 1, 2, 1])),
        (4, vec![2, 3], 11, 1, 8, q(&[0, 0, 0, 1, 1, 1])),
        (4, vec![1, 2, 3], 20, 3, 14, q(&[0, 0, 0, 0, 0, 0, 1])),
    ];
    let mut cells = 0;
    let mut bad = Vec::new();
    for (ell, k, am, b, ap, w) in rows {
        let mask = SubsetMask::new(ell, Ground::OneToLm1, &k)?;
        let got = (
            descent::stat_a(ell, &mask, -1)?,
            descent::stat_b(ell, &mask),
            descent::stat_a(ell, &mask, 1)?,
            descent::w_poly(ell, &mask)?,
        );
        cells += 4;
        if got != (am, b, ap, w) {
            bad.push(format!("ℓ={ell} K={k:?}"));
        }
    }
    outcome(bad.is_empty(), format!("{cells} cells, mismatches: {bad:?}"))
}

fn criterion_1_symmetry() -> Result<Outcome> {
    // a(K) + a(K') = ℓ(ℓ-1)(ℓ+(1-3ε)/4)/3 and q^{ℓ(ℓ-1)/2} w_K(q^{-1}) = w_{K'}(q)
    for ell in 1..=7u32 {
        let l = ell as i64;
        for k in SubsetMask::all(ell, Ground::OneToLm1) {
            let kc = k.complement();
            for eps in [1i64, -1] {
                let total = 4 * (descent::stat_a(ell, &k, eps as i32)? + descent::stat_a(ell, &kc, eps as i32)?);
                if 3 * total != l * (l - 1) * (4 * l + 1 - 3 * eps) {
                    return outcome(false, format!("ℓ={ell} K={:?} ε={eps}", k.elements()));
                }
            }
            let w = descent::w_poly(ell, &k)?.substitute_inverse().shift(l * (l - 1));
            if w != descent::w_poly(ell, &kc)? {
                return outcome(false, format!("ℓ={ell} K={:?} reciprocity", k.elements()));
            }
        }
    }
    outcome(true, "complement symmetry for ℓ ≤ 7; the printed a^(+1)_4({3}) = 2 would break it (a^(+1)_4({1,2}) = 11, sum must be 14)")
}

// ---- criterion 2

fn criterion_2() -> Result<Outcome> {
    let mut checked = 0;
    for ell in 1..=7 {
        for k in SubsetMask::all(ell, Ground::OneToLm1) {
            if descent::w_poly_stanley(ell, &k)? != descent::w_poly_multinomial(ell, &k)? {
                return outcome(false, format!("ℓ={ell} K={:?}", k.elements()));
            }
            checked += 1;
        }
    }
    outcome(true, format!("{checked} subsets, ℓ ≤ 7"))
}

// ---- criterion 3

fn criterion_3() -> Result<Outcome> {
    let mut bad = Vec::new();
    for ell in 1..=6 {
        for eps in [1, -1] {
            if !ash::check_functional_eq_ash(ell, eps)? {
                bad.push(format!("ash ℓ={ell} ε={eps}"));
            }
        }
    }
    for ell in 1..=4 {
        for b2 in [-2, -1, 1, 2] {
            if !totalash::check_fe_total(ell, b2)? {
                bad.push(format!("U ℓ={ell} B={b2}/2"));
            }
        }
        if !totalash::check_p_functional_eq(ell)? {
            bad.push(format!("P_I ℓ={ell}"));
        }
    }
    outcome(bad.is_empty(), format!("failures: {bad:?}"))
}

// ---- criterion 4

struct Golden {
    name: &'static str,
    inv: LocalInvariants,
    exps: Vec<i64>,
    numerator: SeriesPoly,
}

fn check_golden(g: &Golden) -> Result<bool> {
    let lf: LocalFactor = local_factor(&g.inv)?;
    Ok(lf.numerator == g.numerator && lf.denominator_exponents == g.exps)
}

fn u_term(m: &mut Mpoly, t: i64, u: i64, b: i64, x: HalfLaurent) {
    m.add_term(Mono { t, u, b }, &x);
}

fn u_tables() -> Vec<(u32, Mpoly, Mpoly)> {
    let mut out = Vec::new();

    let mut e1 = Mpoly::zero(Var::X);
    u_term(&mut e1, 0, 0, 0, xp(&[(0, 1)]));
    let mut o1 = Mpoly::zero(Var::X);
    u_term(&mut o1, 1, 0, 1, xp(&[(1, 1)]));
    out.push((1, e1, o1));

    let mut e2 = Mpoly::zero(Var::X);
    u_term(&mut e2, 0, 0, 0, xp(&[(0, 1)]));
    u_term(&mut e2, 2, 0, 0, xp(&[(3, 1)]));
    u_term(&mut e2, 2, 1, 1, xp(&[(4, 1), (5, 1)]));
    let mut o2 = Mpoly::zero(Var::X);
    u_term(&mut o2, 1, 0, 1, xp(&[(1, 1), (2, 1)]));
    u_term(&mut o2, 1, 1, 2, xp(&[(3, 1)]));
    u_term(&mut o2, 3, 1, 2, xp(&[(6, 1)]));
    out.push((2, e2, o2));

    let mut e3 = Mpoly::zero(Var::X);
    u_term(&mut e3, 0, 0, 0, xp(&[(0, 1)]));
    // X^4(1+X)(1+u^2X^4)
    u_term(&mut e3, 2, 0, 0, xp(&[(4, 1), (5, 1)]));
    u_term(&mut e3, 2, 2, 0, xp(&[(8, 1), (9, 1)]));
    // u^2 X^{B+7}(1+X)(uX^2+X^B)
    u_term(&mut e3, 2, 3, 1, xp(&[(9, 1), (10, 1)]));
    u_term(&mut e3, 2, 2, 2, xp(&[(7, 1), (8, 1)]));
    // u^2 X^{B+9}(uX^2+X^B)
    u_term(&mut e3, 2, 3, 1, xp(&[(11, 1)]));
    u_term(&mut e3, 2, 2, 2, xp(&[(9, 1)]));
    // uX^{B+5}(1+X)(1+X+X^2)
    u_term(&mut e3, 2, 1, 1, xp(&[(5, 1), (6, 2), (7, 2), (8, 1)]));
    u_term(&mut e3, 4, 2, 0, xp(&[(13, 1)]));
    u_term(&mut e3, 4, 3, 1, xp(&[(14, 1), (15, 1), (16, 1)]));
    u_term(&mut e3, 4, 4, 2, xp(&[(16, 1), (17, 1), (18, 1)]));
    let mut o3 = Mpoly::zero(Var::X);
    u_term(&mut o3, 1, 2, 3, xp(&[(6, 1)]));
    u_term(&mut o3, 1, 1, 2, xp(&[(5, 1)]));
    u_term(&mut o3, 1, 1, 2, xp(&[(3, 1), (4, 1)]));
    u_term(&mut o3, 1, 0, 1, xp(&[(1, 1), (2, 1), (3, 1)]));
    // u^2 X^{3B+10}(1+X)(1+u^2X^4)
    u_term(&mut o3, 3, 2, 3, xp(&[(10, 1), (11, 1)]));
    u_term(&mut o3, 3, 4, 3, xp(&[(14, 1), (15, 1)]));
    // uX^{B+9}(1+X)(X^B+uX^2)
    u_term(&mut o3, 3, 1, 2, xp(&[(9, 1), (10, 1)]));
    u_term(&mut o3, 3, 2, 1, xp(&[(11, 1), (12, 1)]));
    // uX^{B+8}(X^B+uX^2)
    u_term(&mut o3, 3, 1, 2, xp(&[(8, 1)]));
    u_term(&mut o3, 3, 2, 1, xp(&[(10, 1)]));
    // u^3 X^{2B+11}(1+X)(1+X+X^2)
    u_term(&mut o3, 3, 3, 2, xp(&[(11, 1), (12, 2), (13, 2), (14, 1)]));
    u_term(&mut o3, 5, 4, 3, xp(&[(19, 1)]));
    out.push((3, e3, o3));
    out
}

fn goldens() -> Result<Vec<Golden>> {
    let one = xp(&[(0, 1)]);
    let w_minus = [(0, 1), (1, 1), (2, 2), (3, 1), (4, 2), (5, 2), (6, 1), (7, 1)];
    let w_plus = [(0, 1), (1, 2), (2, 2), (3, 3), (4, 2), (5, 1)];
    let shifted = |w: &[(i64, i64)], s: i64, flip: bool| -> HalfLaurent {
        let t: Vec<(i64, i64)> = w.iter().map(|&(e, c)| (if flip { s - e } else { s + e }, c)).collect();
        xp(&t)
    };
    Ok(vec![
        Golden {
            name: "C_2",
            inv: LocalInvariants::symplectic(2, 2)?,
            exps: vec![0, 2, 3],
            numerator: y_poly(&[(0, one.clone()), (4, xp(&[(1, 1)]))]),
        },
        Golden {
            name: "C_3",
            inv: LocalInvariants::symplectic(2, 3)?,
            exps: vec![0, 3, 5, 6],
            numerator: y_poly(&[(0, one.clone()), (6, xp(&[(1, 1), (2, 1), (3, 1), (4, 1)])), (12, xp(&[(5, 1)]))]),
        },
        Golden {
            name: "C_4",
            inv: LocalInvariants::symplectic(2, 4)?,
            exps: vec![0, 4, 7, 9, 10],
            numerator: y_poly(&[
                (0, one.clone()),
                (8, shifted(&w_minus, 1, false)),
                (16, shifted(&w_minus, 13, true)),
                (24, xp(&[(14, 1)])),
            ]),
        },
        Golden {
            name: "D_2",
            inv: LocalInvariants::orthogonal(2, 2, 0, -2, 0, 1)?,
            exps: vec![0, 1, 1],
            numerator: y_poly(&[(0, one.clone()), (4, one.clone())]),
        },
        Golden {
            name: "D_4",
            inv: LocalInvariants::orthogonal(2, 4, 0, -2, 0, 1)?,
            exps: vec![0, 3, 5, 6, 6],
            numerator: y_poly(&[
                (0, one.clone()),
                (8, shifted(&w_plus, 0, false)),
                (16, shifted(&w_plus, 8, true)),
                (24, xp(&[(8, 1)])),
            ]),
        },
        Golden {
            name: "B_1",
            inv: LocalInvariants::orthogonal(2, 1, 1, -1, -1, 2)?,
            exps: vec![0, 1],
            numerator: y_poly(&[(0, one.clone()), (4, xp(&[(0, 1), (1, 1)])), (6, one.clone())]),
        },
        Golden {
            name: "GO(6) p=1 mod 4",
            inv: LocalInvariants::orthogonal(5, 3, 0, -2, 0, 1)?,
            exps: vec![0, 2, 3, 3],
            numerator: y_poly(&[(0, one.clone()), (6, xp(&[(0, 1), (1, 2), (2, 1)])), (12, one)]),
        },
    ])
}

fn c4_factorization() -> Result<bool> {
    // (1+p^5 Z)(1+(p+p^2+2p^3+p^4+p^5+2p^6+p^7+p^8) Z + p^9 Z^2), Z = Y^8
    let a = y_poly(&[(0, xp(&[(0, 1)])), (8, xp(&[(5, 1)]))]);
    let b = y_poly(&[
        (0, xp(&[(0, 1)])),
        (8, xp(&[(1, 1), (2, 1), (3, 2), (4, 1), (5, 1), (6, 2), (7, 1), (8, 1)])),
        (16, xp(&[(9, 1)])),
    ]);
    Ok(local_factor(&LocalInvariants::symplectic(2, 4)?)?.numerator == a.mul(&b))
}

fn criterion_4() -> Result<Outcome> {
    let mut failed = Vec::new();
    let mut passed = Vec::new();
    for g in goldens()? {
        if check_golden(&g)? {
            passed.push(g.name.to_string());
        } else {
            failed.push(g.name.to_string());
        }
    }
    if c4_factorization()? {
        passed.push("C_4 factorization".into());
    } else {
        failed.push("C_4 factorization".into());
    }
    for (ell, e, o) in u_tables() {
        for (name, want, got) in [("even", e, u_parity(ell, Parity::Even)?), ("odd", o, u_parity(ell, Parity::Odd)?)] {
            let label = format!("U^{name}_{ell}");
            if want == got {
                passed.push(label);
            } else {
                failed.push(label);
            }
        }
    }
    outcome(failed.is_empty(), format!("matched {passed:?}; mismatched {failed:?}"))
}

// ---- criterion 5

fn oracle_vs_series(g: &GramLattice, inv: &LocalInvariants, norms: &[u32]) -> Result<(bool, String)> {
    let lf = local_factor(inv)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for &m in norms {
        let counts = count_maximal_at(g, inv.p, m, None, DEFAULT_CAP)?;
        let top = counts.keys().max().copied().unwrap_or(0) as usize;
        let series = lf.series(2 * top)?;
        let single = counts.len() == 1;
        for (&k, &c) in &counts {
            let want = &series[2 * k as usize];
            ok &= single && BigInt::from(c) == *want;
            parts.push(format!("m={m}:{c}@p^{k}"));
        }
        ok &= !counts.is_empty();
    }
    Ok((ok, parts.join(" ")))
}

fn oracle_at(g: &GramLattice, inv: &LocalInvariants, m: u32, k: u32) -> Result<(bool, String)> {
    let lf = local_factor(inv)?;
    let series = lf.series(2 * k as usize)?;
    let counts = count_maximal_at(g, inv.p, m, Some(k), DEFAULT_CAP)?;
    let c = counts.get(&k).copied().unwrap_or(0);
    Ok((BigInt::from(c) == series[2 * k as usize], format!("m={m}:{c}@p^{k} (series {})", series[2 * k as usize])))
}

fn criterion_5() -> Result<Outcome> {
    let mut ok = true;
    let mut lines = Vec::new();
    let mut run = |name: String, r: (bool, String)| {
        ok &= r.0;
        lines.push(format!("{name} {}", r.1));
    };
    for p in [2, 3] {
        run(format!("C_2 p={p}"), oracle_vs_series(&GramLattice::split_symplectic(2), &LocalInvariants::symplectic(p, 2)?, &[1, 2])?);
        run(
            format!("D_2 p={p}"),
            oracle_vs_series(&GramLattice::split_orthogonal(2), &LocalInvariants::orthogonal(p, 2, 0, -2, 0, 1)?, &[1, 2])?,
        );
        run(
            format!("B_1 p={p}"),
            oracle_vs_series(&GramLattice::odd_orthogonal(1), &LocalInvariants::orthogonal(p, 1, 1, -1, -1, 2)?, &[1, 2, 3])?,
        );
    }
    let b2 = LocalInvariants::orthogonal(2, 2, 1, -1, -1, 2)?;
    run("B_2 p=2 odd class".into(), oracle_at(&GramLattice::odd_orthogonal(2), &b2, 1, 3)?);
    run("B_2 p=2 middle".into(), oracle_at(&GramLattice::odd_orthogonal(2), &b2, 2, 5)?);
    let go6 = LocalInvariants::orthogonal(3, 2, 2, 0, -2, 2)?;
    run("GO(6) p=3 odd class".into(), oracle_at(&GramLattice::go6_nonsplit(), &go6, 1, 4)?);
    run("GO(6) p=3 even class".into(), oracle_at(&GramLattice::go6_nonsplit(), &go6, 2, 6)?);
    outcome(ok, lines.join("; "))
}

// ---- criterion 6

fn criterion_6() -> Result<Outcome> {
    for n in 1..=4u32 {
        let d = dirichlet_coeffs(&GlobalSpec::gl(n, 60)?, 60)?;
        for m in 1..=60u64 {
            let brute = enum_sublattices(n as usize, m, DEFAULT_CAP)?.len();
            let want = d.get(m as usize).cloned().unwrap_or_default();
            if BigInt::from(brute) != want {
                return outcome(false, format!("n={n} m={m}: brute {brute}, series {want}"));
            }
        }
    }
    outcome(true, "n ≤ 4, index ≤ 60")
}

// ---- criterion 7

fn criterion_7() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [1, 2, 3, 4, 6] {
        let c = latoracle::crosscheck_symplectic(2, m)?;
        ok &= c.holds;
        parts.push(format!("m={m}: {} vs {}", c.lhs, c.rhs));
    }
    outcome(ok, parts.join(", "))
}

fn criterion_7_corrected() -> Result<Outcome> {
    let mut ok = true;
    for m in [1, 2, 3, 4, 6] {
        ok &= latoracle::crosscheck_corrected(2, m)?.holds;
    }
    outcome(ok, "weights d·∏δ_j^{j+1}, ℓ=2, m ∈ {1,2,3,4,6}")
}

// ---- criterion 8

fn criterion_8(literal: bool) -> Result<Outcome> {
    let mut bad = Vec::new();
    for ell in 1..=4 {
        for a2 in [-2, -1, 0] {
            let ok = if literal {
                totalash::check_b0_degeneration_literal(ell, a2)?
            } else {
                totalash::check_b0_degeneration(ell, a2)?
            };
            if !ok {
                bad.push(format!("ℓ={ell} A={}", maxlat::exactpoly::format_exp2(a2)));
            }
        }
    }
    outcome(bad.is_empty(), format!("failures: {bad:?}"))
}

// ---- criterion 9

fn criterion_9() -> Result<Outcome> {
    let s0 = Rational64::new(7, 3);
    let lo = GlobalSpec::symplectic(3, 1_000)?;
    let hi = GlobalSpec::symplectic(3, 10_000)?;
    let (e1, t1) = euler_correction(&lo, s0, 1_000)?;
    let (e2, _) = euler_correction(&hi, s0, 10_000)?;
    let r = pole_report(&hi)?;
    let zeta7 = 1.008_349_277_381_922_8;
    let want = PI * PI / 6.0 * PI.powi(4) / 90.0 * zeta7;
    let dz = (r.zeta_part - want).abs();
    let de = (e1 - e2).abs();
    let ok = r.s0 == s0 && de < 1e-4 && dz < 1e-10;
    outcome(
        ok,
        format!(
            "|ΔE| = {de:.2e} (tail {:.1e}), |zetaPart - ζ(2)ζ(4)ζ(7)| = {dz:.1e}; residue {:.6} (without 1/ℓ: {:.6}), Res/s0 {:.6} / {:.6}; cited 2.830 not compared",
            t1.unwrap_or(f64::NAN),
            r.leading,
            r.leading_literal,
            r.leading / (7.0 / 3.0),
            r.leading_literal / (7.0 / 3.0)
        ),
    )
}

// ---- criterion 10

fn criterion_10() -> Result<Outcome> {
    let mut checked = 0;
    for ell in 1..=4 {
        for &(a2, b2) in &TABLE_AB {
            for p in [2, 3, 5] {
                let inv = LocalInvariants::orthogonal(p, ell, (a2 + 2) as u32, a2, b2, 2)?;
                let series = match local_factor(&inv)?.series(40) {
                    Ok(s) => s,
                    Err(e) => return outcome(false, format!("{inv:?}: {e}")),
                };
                if series.iter().any(|c| c.sign() == num_bigint::Sign::Minus) {
                    return outcome(false, format!("{inv:?}: negative coefficient"));
                }
                checked += 1;
            }
        }
    }
    outcome(true, format!("{checked} factors, Y-degree ≤ 40"))
}

type Check = fn() -> Result<Outcome>;

#[test]
fn acceptance() {
    // (criterion, description, check, expected to pass, runtime budget)
    let suite: Vec<(&str, &str, Check, bool, Duration)> = vec![
        ("1", "descent tables as printed", criterion_1, false, Duration::from_secs(1)),
        ("1*", "complement symmetry of the descent statistics (informational)", criterion_1_symmetry, true, Duration::from_secs(30)),
        ("2", "Stanley vs multinomial descent polynomials", criterion_2, true, Duration::from_secs(30)),
        ("3", "functional equations", criterion_3, true, Duration::from_secs(600)),
        ("4", "printed Euler factors and U-tables", criterion_4, false, Duration::from_secs(600)),
        ("5", "oracle equivalence", criterion_5, true, Duration::from_secs(600)),
        ("6", "sublattice counts of Z^n", criterion_6, true, Duration::from_secs(60)),
        ("7", "symplectic elementary-divisor identity as printed", criterion_7, false, Duration::from_secs(600)),
        ("7*", "same identity, derived weights (informational)", criterion_7_corrected, true, Duration::from_secs(600)),
        ("8", "B=0 degeneration as printed", || criterion_8(true), false, Duration::from_secs(600)),
        ("8*", "B=0 degeneration, exponent A(ℓ-r) (informational)", || criterion_8(false), true, Duration::from_secs(600)),
        ("9", "Euler correction stability at s0=7/3", criterion_9, true, Duration::from_secs(600)),
        ("10", "positivity and integrality of local series", criterion_10, true, Duration::from_secs(600)),
    ];
    let mut unexpected = Vec::new();
    for (id, what, check, expect, budget) in suite {
        let t = Instant::now();
        let res = check();
        let dt = t.elapsed();
        let (pass, detail) = match res {
            Ok(o) => (o.pass && dt <= budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let slow = if dt > budget { " over budget" } else { "" };
        // straight to the stderr handle so the lines survive output capture
        let _ = writeln!(
            std::io::stderr().lock(),
            "criterion {id}: {} ({what}; {:.2}s{slow}) {detail}",
            if pass { "PASS" } else { "FAIL" },
            dt.as_secs_f64()
        );
        if pass != expect {
            unexpected.push(id);
        }
    }
    assert!(unexpected.is_empty(), "unexpected outcomes for criteria {unexpected:?}");
}
