use maxlat::ash;
use maxlat::descent::{self, Ground, SubsetMask};
use maxlat::exactpoly::{eval_at_prime, hl_mul, hl_substitute_inverse, rat, HalfLaurent, Var};
use maxlat::globalzeta::{self, GlobalKind, GlobalSpec};
use maxlat::latoracle::{self, GramLattice, HnfBasis};
use maxlat::localzeta::{self, LocalInvariants};
use maxlat::totalash::{self, Parity, TotalAshSpec, TABLE_AB};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small_poly(half: bool) -> impl Strategy<Value = HalfLaurent> {
    prop::collection::vec((-6i64..=6, -4i64..=4), 0..5).prop_map(move |terms| {
        HalfLaurent::from_terms(
            Var::X,
            terms.into_iter().map(|(e, c)| (if half { e } else { 2 * e }, rat(c))),
        )
    })
}

fn subset(ell: u32, ground: Ground) -> impl Strategy<Value = SubsetMask> {
    let all: Vec<SubsetMask> = SubsetMask::all(ell, ground).collect();
    prop::sample::select(all)
}

fn ell_and_k(max: u32) -> impl Strategy<Value = (u32, SubsetMask)> {
    (1..=max).prop_flat_map(|ell| (Just(ell), subset(ell, Ground::OneToLm1)))
}

fn valid_local() -> impl Strategy<Value = LocalInvariants> {
    let p = prop::sample::select(vec![2u64, 3, 5, 7]);
    let kind = prop_oneof![
        (1u32..=4).prop_map(|ell| (ell, None)),
        (0u32..=4, prop::sample::select(vec![0u32, 2, 4]))
            .prop_filter("dimension 0", |&(ell, n0)| ell + n0 > 0)
            .prop_map(|(ell, n0)| (ell, Some((n0, 0i64, 1u8)))),
        (1u32..=4, prop::sample::select(TABLE_AB.to_vec()))
            .prop_map(|(ell, (a2, b2))| (ell, Some(((a2 + 2) as u32, b2, 2u8)))),
    ];
    (p, kind).prop_map(|(p, (ell, o))| match o {
        None => LocalInvariants::symplectic(p, ell).unwrap(),
        Some((n0, b2, f)) => LocalInvariants::orthogonal(p, ell, n0, n0 as i64 - 2, b2, f).unwrap(),
    })
}

fn col_hnf(mut m: Vec<Vec<i128>>) -> HnfBasis {
    let n = m.len();
    for i in (0..n).rev() {
        for j in 0..i {
            while m[i][j] != 0 {
                let q = Integer::div_floor(&m[i][i], &m[i][j]);
                for r in 0..n {
                    let v = m[r][j];
                    m[r][i] -= q * v;
                }
                for r in 0..n {
                    m[r].swap(i, j);
                }
            }
        }
        if m[i][i] < 0 {
            for r in 0..n {
                m[r][i] = -m[r][i];
            }
        }
        for j in i + 1..n {
            let q = Integer::div_floor(&m[i][j], &m[i][i]);
            for r in 0..n {
                let v = m[r][i];
                m[r][j] -= q * v;
            }
        }
    }
    HnfBasis::new(m.into_iter().map(|r| r.into_iter().map(|v| v as i64).collect()).collect()).unwrap()
}

fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> Vec<Vec<i128>> {
    let mut u: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    for &(a, b, c) in ops {
        let (a, b) = (a % n, b % n);
        if a == b {
            u.swap(a, (a + 1) % n);
            continue;
        }
        for j in 0..n {
            let v = u[b][j];
            u[a][j] += c as i128 * v;
        }
    }
    u
}

fn matmul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn transpose(a: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

fn widen(m: &[Vec<i64>]) -> Vec<Vec<i128>> {
    m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mul_is_commutative_and_associative(a in small_poly(true), b in small_poly(true), c in small_poly(true)) {
        let ab = hl_mul(&a, &b).unwrap();
        prop_assert_eq!(&ab, &hl_mul(&b, &a).unwrap());
        prop_assert_eq!(hl_mul(&ab, &c).unwrap(), hl_mul(&a, &hl_mul(&b, &c).unwrap()).unwrap());
        prop_assert_eq!(hl_mul(&a, &(&b + &c)).unwrap(), &ab + &hl_mul(&a, &c).unwrap());
    }

    #[test]
    fn substitute_inverse_is_involution(a in small_poly(true)) {
        prop_assert_eq!(hl_substitute_inverse(&hl_substitute_inverse(&a)), a);
    }

    #[test]
    fn evaluation_is_multiplicative(a in small_poly(false), b in small_poly(false), p in prop::sample::select(vec![2u64, 3, 5, 7, 11])) {
        let t = rat(1);
        let lhs = eval_at_prime(&hl_mul(&a, &b).unwrap(), p, &t).unwrap();
        let rhs = eval_at_prime(&a, p, &t).unwrap() * eval_at_prime(&b, p, &t).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn stanley_equals_multinomial((ell, k) in ell_and_k(7)) {
        prop_assert_eq!(descent::w_poly_stanley(ell, &k).unwrap(), descent::w_poly_multinomial(ell, &k).unwrap());
    }

    #[test]
    fn descent_reflection((ell, k) in ell_and_k(7)) {
        let w = descent::w_poly(ell, &k).unwrap();
        let wc = descent::w_poly(ell, &k.complement()).unwrap();
        let l = ell as i64;
        prop_assert_eq!(w.substitute_inverse().shift(l * (l - 1)), wc);
    }

    #[test]
    fn descent_extreme_terms((ell, k) in ell_and_k(7)) {
        prop_assume!(!k.is_empty());
        let w = descent::w_poly(ell, &k).unwrap();
        let lo = w.min_exp2().unwrap();
        prop_assert_eq!(lo, 2 * descent::stat_n(&k));
        prop_assert_eq!(w.coeff(lo), rat(1));
        let hi = w.max_exp2().unwrap();
        let l = ell as i64;
        prop_assert_eq!(hi, l * (l - 1) - 2 * descent::stat_n(&k.complement()));
        prop_assert_eq!(w.coeff(hi), rat(1));
    }

    #[test]
    fn exponent_sum_law((ell, k) in ell_and_k(7), eps in prop::sample::select(vec![1i32, -1])) {
        let s = descent::stat_a(ell, &k, eps).unwrap() + descent::stat_a(ell, &k.complement(), eps).unwrap();
        let l = ell as i64;
        // ℓ(ℓ-1)(ℓ + (1-3ε)/4)/3, times 12
        prop_assert_eq!(12 * s, l * (l - 1) * (4 * l + 1 - 3 * eps as i64));
    }

    #[test]
    fn mu_formula((ell, k) in ell_and_k(7), eps in prop::sample::select(vec![1i32, -1])) {
        let l = ell as i64;
        let e = eps as i64;
        let rhs = descent::stat_n(&k) - descent::stat_a(ell, &k, eps).unwrap() + k.len() as i64 * l * (l - e) / 2;
        prop_assert_eq!(descent::mu(&k, eps).unwrap(), rhs);
    }

    #[test]
    fn flat_natural_inverse(ell in 1u32..=10, bits in any::<u64>()) {
        let i = SubsetMask::from_bits(ell, Ground::OneToL, (bits << 1) & ((1u64 << (ell + 1)) - 2)).unwrap();
        prop_assert_eq!(descent::natural(&descent::flat(&i).unwrap()).unwrap(), i);
        let h = SubsetMask::from_bits(ell, Ground::ZeroToLm1, bits & ((1u64 << ell) - 1)).unwrap();
        prop_assert_eq!(descent::flat(&descent::natural(&h).unwrap()).unwrap(), h);
    }

    #[test]
    fn local_series_nonnegative(inv in valid_local()) {
        let s = localzeta::local_series_coeffs(&inv, 40);
        if let Ok(s) = s {
            prop_assert!(s.iter().all(|c| !c.is_negative()));
            prop_assert_eq!(&s[0], &BigInt::from(1));
        } else {
            prop_assert!(inv.ell == 0 && inv.f == 2);
        }
    }

    #[test]
    fn local_degree_bookkeeping(inv in valid_local()) {
        prop_assume!(inv.ell > 0);
        let lf = localzeta::local_factor(&inv).unwrap();
        prop_assert!(lf.numerator.degree().unwrap_or(0) <= 2 * inv.ell as usize * inv.n() as usize);
        prop_assert_eq!(lf.denominator_exponents.len(), inv.ell as usize + 1);
    }

    #[test]
    fn f1_matches_total_at_b0(p in prop::sample::select(vec![2u64, 3, 5]), ell in 1u32..=3, n0 in prop::sample::select(vec![0u32, 2, 4])) {
        let a2 = n0 as i64 - 2;
        let f1 = localzeta::local_factor(&LocalInvariants::orthogonal(p, ell, n0, a2, 0, 1).unwrap()).unwrap();
        let f2 = localzeta::local_factor_via_total(p, &TotalAshSpec::new(ell, a2, 0).unwrap()).unwrap();
        prop_assert_eq!(f1.series(40).unwrap(), f2.series(40).unwrap());
    }

    #[test]
    fn dirichlet_multiplicative(a in 1usize..=60, b in 1usize..=60, kind in 0usize..3) {
        prop_assume!(a.gcd(&b) == 1);
        let spec = match kind {
            0 => GlobalSpec::gl(3, 4000).unwrap(),
            1 => GlobalSpec::symplectic(2, 4000).unwrap(),
            _ => GlobalSpec::go6_nonsplit(4000).unwrap(),
        };
        let c = globalzeta::dirichlet_coeffs(&spec, 3600).unwrap();
        let prod = c.get(a).unwrap() * c.get(b).unwrap();
        prop_assert_eq!(c.get(a * b).unwrap(), &prod);
    }

    #[test]
    fn sublattice_count_matches_gl_series(n in 1u32..=4, m in 1u64..=60) {
        let c = globalzeta::dirichlet_coeffs(&GlobalSpec::gl(n, 100).unwrap(), 60).unwrap();
        prop_assert_eq!(BigInt::from(latoracle::hnf_count(n as usize, m)), c.get(m as usize).unwrap().clone());
    }

    #[test]
    fn maximality_is_basis_independent(
        which in 0usize..3,
        p in prop::sample::select(vec![2u64, 3]),
        k in 1u32..=2,
        pick in any::<prop::sample::Index>(),
        ops in prop::collection::vec((0usize..6, 0usize..6, -2i64..=2), 0..6),
    ) {
        let g = match which {
            0 => GramLattice::split_symplectic(2),
            1 => GramLattice::split_orthogonal(2),
            _ => GramLattice::odd_orthogonal(1),
        };
        let n = g.n();
        let subs = latoracle::enum_sublattices(n, p.pow(k), 1_000_000).unwrap();
        let h = pick.get(&subs);
        let u = unimodular(n, &ops);
        let gu = matmul(&transpose(&u), &matmul(&widen(g.gram()), &u));
        let g2 = GramLattice::new(gu.into_iter().map(|r| r.into_iter().map(|v| v as i64).collect()).collect(), g.kind()).unwrap();
        // h in new coordinates is U·h in the old ones
        let old = col_hnf(matmul(&u, &widen(h.matrix())));
        prop_assert_eq!(old.index(), h.index());
        prop_assert_eq!(latoracle::is_maximal(&g2, h, p), latoracle::is_maximal(&g, &old, p));
        prop_assert_eq!(latoracle::norm_ord(&g2, h, p), latoracle::norm_ord(&g, &old, p));
    }

    #[test]
    fn local_invariants_json_round_trip(inv in valid_local()) {
        let s = serde_json::to_string(&inv).unwrap();
        prop_assert_eq!(serde_json::from_str::<LocalInvariants>(&s).unwrap(), inv);
    }

    #[test]
    fn polynomial_json_round_trip(a in small_poly(true)) {
        let s = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<HalfLaurent>(&s).unwrap(), a);
    }
}

#[test]
fn descent_sets_partition_the_symmetric_group() {
    for ell in 1..=7u32 {
        let total: i64 = SubsetMask::all(ell, Ground::OneToLm1)
            .map(|k| {
                let w = descent::w_poly_stanley(ell, &k).unwrap();
                w.terms().map(|(_, c)| c.to_integer().try_into().unwrap_or(0i64)).sum::<i64>()
            })
            .sum();
        assert_eq!(total, (1..=ell as i64).product::<i64>(), "ℓ={ell}");
    }
}

#[test]
fn ash_functional_equation_and_positivity() {
    for ell in 1..=6 {
        for eps in [1, -1] {
            assert!(ash::check_functional_eq_ash(ell, eps).unwrap(), "ℓ={ell} ε={eps}");
            let w = ash::w_eps(ell, eps).unwrap();
            assert!(w.is_integral() && w.is_nonnegative(), "ℓ={ell} ε={eps}");
        }
    }
}

#[test]
fn gamma_endpoints_have_multiplicity_one() {
    for ell in 2..=6u32 {
        for d in 1..ell {
            for eps in [1, -1] {
                let row = ash::gamma_row(ell, d, eps).unwrap();
                let (alpha, beta) = ash::alpha_beta(ell, d, eps).unwrap();
                let lo = rat(*row.keys().next().unwrap());
                let hi = rat(*row.keys().next_back().unwrap());
                let dd = rat(d as i64);
                assert_eq!((lo.clone(), hi.clone()), (&dd * &alpha, &dd * &beta), "ℓ={ell} d={d} ε={eps}");
                assert_eq!(row.values().next(), Some(&1));
                assert_eq!(row.values().next_back(), Some(&1));
            }
        }
    }
}

#[test]
fn total_polynomial_laws() {
    for ell in 1..=5u32 {
        if ell <= 4 {
            assert!(totalash::check_p_functional_eq(ell).unwrap(), "ℓ={ell}");
        }
        assert!(totalash::check_p_vs_script_u(ell).unwrap(), "ℓ={ell}");
        assert!(totalash::check_p_sum(ell).unwrap(), "ℓ={ell}");
        for (a2, b2) in TABLE_AB {
            let spec = TotalAshSpec::new(ell, a2, b2).unwrap();
            let w = totalash::w_total(&spec).unwrap();
            assert!(w.is_integral() && w.is_nonnegative(), "ℓ={ell} A,B={a2},{b2}");
            let (deg, x2) = totalash::second_lowest_term(&w).unwrap();
            let n = spec.n();
            let l = ell as i64;
            assert_eq!(deg as i64, n - b2, "ℓ={ell} A,B={a2},{b2}");
            assert_eq!(x2, l * (l + 1) + (a2 - b2) * l, "ℓ={ell} A,B={a2},{b2}");
        }
    }
}

#[test]
fn parity_tables_agree_with_p_route() {
    for ell in 1..=3 {
        for parity in [Parity::Even, Parity::Odd] {
            assert_eq!(totalash::u_parity(ell, parity).unwrap(), totalash::u_parity_via_p(ell, parity).unwrap());
        }
    }
}

#[test]
fn oracle_index_matches_norm() {
    for (g, ell) in [(GramLattice::split_symplectic(2), 2u32), (GramLattice::split_orthogonal(2), 2)] {
        let n = 2 * ell;
        let counts = latoracle::count_maximal(&g, 2, 2, latoracle::DEFAULT_CAP).unwrap();
        for (&(k, m), &c) in &counts.counts {
            if c > 0 {
                assert_eq!(k, m * n / 2, "index p^{k} with norm p^{m}");
            }
        }
    }
    let counts = latoracle::count_maximal(&GramLattice::odd_orthogonal(1), 2, 3, latoracle::DEFAULT_CAP).unwrap();
    for (&(k, m), &c) in &counts.counts {
        if c > 0 {
            // f = 2, B = -1/2: k = m·n/2 for even m, 1/2 + (m·n)/2 for odd m
            let doubled = if m % 2 == 0 { m * 3 } else { 1 + m * 3 };
            assert_eq!(2 * k, doubled, "index p^{k} with norm p^{m}");
        }
    }
}

#[test]
fn leading_coefficients_positive() {
    let specs = [
        GlobalSpec::gl(3, 1000).unwrap(),
        GlobalSpec::symplectic(1, 1000).unwrap(),
        GlobalSpec::symplectic(2, 1000).unwrap(),
        GlobalSpec::new(GlobalKind::EvenSplit, 4, 1, Default::default(), 1000, 53).unwrap(),
        GlobalSpec::new(GlobalKind::Odd, 3, 1, Default::default(), 1000, 53).unwrap(),
        GlobalSpec::go6_nonsplit(1000).unwrap(),
    ];
    for spec in specs {
        let r = globalzeta::pole_report(&spec).unwrap();
        assert!(r.leading > 0.0, "{:?}", spec.kind);
        let back: globalzeta::PoleReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back.s0, r.s0);
        assert!(!back.leading.is_zero());
    }
}

#[test]
fn correction_stable_in_prime_bound() {
    let spec = GlobalSpec::symplectic(2, 10_000).unwrap();
    let s0 = globalzeta::pole_report(&spec).unwrap().s0;
    let (a, tail) = globalzeta::euler_correction(&spec, s0, 1000).unwrap();
    let (b, _) = globalzeta::euler_correction(&spec, s0, 10_000).unwrap();
    assert!((a - b).abs() <= tail.unwrap());
}
