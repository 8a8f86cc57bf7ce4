//! Brute-force ground truth: HNF enumeration of sublattices of `Z^n`, norms, maximality.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localzeta::{self, is_prime, LocalInvariants};

/// Default cap on visited enumeration nodes per query.
pub const DEFAULT_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    Symmetric,
    Alternating,
}

/// `Z^n` with the bilinear form `β(x,y) = xᵀSy`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramLattice {
    gram: Vec<Vec<i64>>,
    kind: FormKind,
}

fn ord_p(x: i128, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let p = p as i128;
    let (mut x, mut k) = (x, 0);
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    Some(k)
}

fn det_i128(m: &[Vec<i128>]) -> i128 {
    // Bareiss fraction-free elimination
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn prime_factors(mut x: u128) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= x {
        if x.is_multiple_of(d) {
            out.push(d as u64);
            while x.is_multiple_of(d) {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        out.push(x as u64);
    }
    out
}

fn anti_identity(l: usize) -> Vec<Vec<i64>> {
    (0..l).map(|i| (0..l).map(|j| i64::from(i + j + 1 == l)).collect()).collect()
}

fn block(rows: &mut [Vec<i64>], r0: usize, c0: usize, b: &[Vec<i64>], scale: i64) {
    for (i, row) in b.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            rows[r0 + i][c0 + j] = scale * v;
        }
    }
}

impl GramLattice {
    /// Validates shape, symmetry type, nondegeneracy and, for symmetric forms, even
    /// diagonal and maximality of `Z^n` at `2` and at every prime dividing `det S`.
    pub fn new(gram: Vec<Vec<i64>>, kind: FormKind) -> Result<Self> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|r| r.len() != n) {
            return Err(Error::Usage("Gram matrix must be square and nonempty".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let ok = match kind {
                    FormKind::Symmetric => gram[i][j] == gram[j][i],
                    FormKind::Alternating => gram[i][j] == -gram[j][i],
                };
                if !ok {
                    return Err(Error::Usage(format!("Gram matrix is not {kind:?} at ({i},{j})")));
                }
            }
        }
        if kind == FormKind::Symmetric && (0..n).any(|i| gram[i][i] % 2 != 0) {
            return Err(Error::Usage("symmetric Gram matrix needs an even diagonal".into()));
        }
        let g = GramLattice { gram, kind };
        let det = g.det();
        if det == 0 {
            return Err(Error::Usage("Gram matrix is degenerate".into()));
        }
        if kind == FormKind::Symmetric {
            let mut primes = prime_factors(det.unsigned_abs());
            if !primes.contains(&2) {
                primes.push(2);
            }
            let id = HnfBasis::identity(n);
            for p in primes {
                if !is_maximal(&g, &id, p) {
                    return Err(Error::Usage(format!("Z^{n} is not maximal at p={p}")));
                }
            }
        }
        Ok(g)
    }

    /// Plain text: `n`, then `n` rows of integers, then `symmetric` or `alternating`.
    /// Lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Usage("empty Gram file".into()))?
            .parse()
            .map_err(|e| Error::Usage(format!("bad dimension: {e}")))?;
        let mut gram = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines.next().ok_or_else(|| Error::Usage(format!("missing row {i}")))?;
            let row: std::result::Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
            let row = row.map_err(|e| Error::Usage(format!("bad entry in row {i}: {e}")))?;
            if row.len() != n {
                return Err(Error::Usage(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            gram.push(row);
        }
        let kind = match lines.next() {
            Some("symmetric") => FormKind::Symmetric,
            Some("alternating") => FormKind::Alternating,
            Some(t) => return Err(Error::Usage(format!("unknown kind tag {t:?}"))),
            None => return Err(Error::Usage("missing kind tag".into())),
        };
        Self::new(gram, kind)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n());
        for row in &self.gram {
            let r: Vec<String> = row.iter().map(i64::to_string).collect();
            s.push_str(&r.join(" "));
            s.push('\n');
        }
        s.push_str(match self.kind {
            FormKind::Symmetric => "symmetric\n",
            FormKind::Alternating => "alternating\n",
        });
        s
    }

    /// `[[0, J], [-J, 0]]`.
    pub fn split_symplectic(ell: usize) -> Self {
        let mut g = vec![vec![0; 2 * ell]; 2 * ell];
        let j = anti_identity(ell);
        block(&mut g, 0, ell, &j, 1);
        block(&mut g, ell, 0, &j, -1);
        Self::new(g, FormKind::Alternating).expect("standard form")
    }

    /// `[[0, J], [J, 0]]`.
    pub fn split_orthogonal(ell: usize) -> Self {
        let mut g = vec![vec![0; 2 * ell]; 2 * ell];
        let j = anti_identity(ell);
        block(&mut g, 0, ell, &j, 1);
        block(&mut g, ell, 0, &j, 1);
        Self::new(g, FormKind::Symmetric).expect("standard form")
    }

    /// `[[0,0,J],[0,2,0],[J,0,0]]`.
    pub fn odd_orthogonal(ell: usize) -> Self {
        let n = 2 * ell + 1;
        let mut g = vec![vec![0; n]; n];
        let j = anti_identity(ell);
        block(&mut g, 0, ell + 1, &j, 1);
        block(&mut g, ell + 1, 0, &j, 1);
        g[ell][ell] = 2;
        Self::new(g, FormKind::Symmetric).expect("standard form")
    }

    /// `[[0,0,J_2],[0,2·1_2,0],[J_2,0,0]]`: six-dimensional with discriminant field `Q(√-1)`.
    pub fn go6_nonsplit() -> Self {
        let mut g = vec![vec![0; 6]; 6];
        let j = anti_identity(2);
        block(&mut g, 0, 4, &j, 1);
        block(&mut g, 4, 0, &j, 1);
        g[2][2] = 2;
        g[3][3] = 2;
        Self::new(g, FormKind::Symmetric).expect("standard form")
    }

    pub fn n(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn det(&self) -> i128 {
        let m: Vec<Vec<i128>> = self.gram.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        det_i128(&m)
    }

    pub fn beta(&self, x: &[i64], y: &[i64]) -> i128 {
        let mut acc = 0i128;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                acc += xi as i128 * self.gram[i][j] as i128 * yj as i128;
            }
        }
        acc
    }

    /// Gram matrix of the basis columns.
    fn gram_of(&self, h: &HnfBasis) -> Vec<Vec<i128>> {
        let cols: Vec<Vec<i64>> = (0..h.n()).map(|j| h.column(j)).collect();
        cols.iter().map(|a| cols.iter().map(|b| self.beta(a, b)).collect()).collect()
    }
}

/// Upper-triangular basis in Hermite normal form; column `j` is the `j`-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HnfBasis {
    matrix: Vec<Vec<i64>>,
}

impl HnfBasis {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Usage("HNF matrix must be square".into()));
        }
        for i in 0..n {
            if matrix[i][i] <= 0 {
                return Err(Error::Usage("HNF diagonal must be positive".into()));
            }
            for j in 0..n {
                let v = matrix[i][j];
                let ok = if j < i { v == 0 } else if j > i { 0 <= v && v < matrix[i][i] } else { true };
                if !ok {
                    return Err(Error::Usage(format!("entry ({i},{j}) violates the HNF conditions")));
                }
            }
        }
        Ok(HnfBasis { matrix })
    }

    /// Hermite normal form of the lattice spanned by the columns of a nonsingular `m`.
    pub fn from_columns(m: &[Vec<i64>]) -> Result<Self> {
        let n = m.len();
        if n == 0 || m.iter().any(|r| r.len() != n) {
            return Err(Error::Usage("basis matrix must be square and nonempty".into()));
        }
        let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let col_axpy = |a: &mut Vec<Vec<i128>>, dst: usize, src: usize, c: i128| {
            for row in a.iter_mut() {
                row[dst] -= c * row[src];
            }
        };
        for i in (0..n).rev() {
            for j in 0..i {
                while a[i][j] != 0 {
                    let q = a[i][i].div_euclid(a[i][j]);
                    col_axpy(&mut a, i, j, q);
                    for row in a.iter_mut() {
                        row.swap(i, j);
                    }
                }
            }
            if a[i][i] == 0 {
                return Err(Error::Usage("basis matrix is singular".into()));
            }
            if a[i][i] < 0 {
                for row in a.iter_mut() {
                    row[i] = -row[i];
                }
            }
            for j in i + 1..n {
                let q = a[i][j].div_euclid(a[i][i]);
                col_axpy(&mut a, j, i, q);
            }
        }
        let matrix = a
            .into_iter()
            .map(|r| r.into_iter().map(|x| i64::try_from(x).map_err(|_| Error::Resource("HNF entry overflow".into()))).collect())
            .collect::<Result<_>>()?;
        Self::new(matrix)
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1; n])
    }

    pub fn diag(d: &[i64]) -> Self {
        let n = d.len();
        let matrix = (0..n).map(|i| (0..n).map(|j| if i == j { d[i] } else { 0 }).collect()).collect();
        HnfBasis { matrix }
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.matrix.iter().map(|r| r[j]).collect()
    }

    pub fn index(&self) -> u128 {
        (0..self.n()).map(|i| self.matrix[i][i] as u128).product()
    }

    /// Whether `v` lies in the column span.
    pub fn contains(&self, v: &[i64]) -> bool {
        let n = self.n();
        let mut r: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for j in (0..n).rev() {
            let d = self.matrix[j][j] as i128;
            if r[j] % d != 0 {
                return false;
            }
            let c = r[j] / d;
            for i in 0..=j {
                r[i] -= c * self.matrix[i][j] as i128;
            }
        }
        true
    }

    /// Invariant factors `s_1 | s_2 | … | s_n` of `Z^n / Λ`, via determinantal divisors.
    pub fn invariant_factors(&self) -> Vec<u128> {
        let n = self.n();
        let m: Vec<Vec<i128>> = self.matrix.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut dets = vec![1u128];
        for k in 1..=n {
            let mut g = 0u128;
            for rows in subsets(n, k) {
                for cols in subsets(n, k) {
                    let minor: Vec<Vec<i128>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect();
                    g = num_integer::gcd(g, det_i128(&minor).unsigned_abs());
                    if g == 1 {
                        break;
                    }
                }
            }
            dets.push(g);
        }
        (1..=n).map(|k| dets[k] / dets[k - 1]).collect()
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn ordered_factorizations(m: u64, n: usize) -> Vec<Vec<u64>> {
    if n == 0 {
        return if m == 1 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for d in 1..=m {
        if m.is_multiple_of(d) {
            for mut rest in ordered_factorizations(m / d, n - 1) {
                rest.insert(0, d);
                out.push(rest);
            }
        }
    }
    out
}

/// Number of sublattices of `Z^n` of index `m`, from the HNF parametrization.
pub fn hnf_count(n: usize, m: u64) -> u128 {
    ordered_factorizations(m, n)
        .iter()
        .map(|d| d.iter().enumerate().map(|(i, &di)| (di as u128).pow((n - 1 - i) as u32)).product::<u128>())
        .sum()
}

/// Every sublattice of `Z^n` of index `m`, once each.
pub fn enum_sublattices(n: usize, m: u64, cap: u64) -> Result<Vec<HnfBasis>> {
    if n == 0 || m == 0 {
        return Err(Error::Usage("need n ≥ 1 and index ≥ 1".into()));
    }
    let total = hnf_count(n, m);
    if total > cap as u128 {
        return Err(Error::Resource(format!("{total} sublattices of index {m} in Z^{n} exceed the cap {cap}")));
    }
    let mut out = Vec::with_capacity(total as usize);
    for diag in ordered_factorizations(m, n) {
        let mut h = HnfBasis::diag(&diag.iter().map(|&d| d as i64).collect::<Vec<_>>());
        fill_entries(&mut h, 0, 1, &mut out);
    }
    Ok(out)
}

fn fill_entries(h: &mut HnfBasis, i: usize, j: usize, out: &mut Vec<HnfBasis>) {
    let n = h.n();
    if i + 1 >= n {
        out.push(h.clone());
        return;
    }
    if j >= n {
        fill_entries(h, i + 1, i + 2, out);
        return;
    }
    for v in 0..h.matrix[i][i] {
        h.matrix[i][j] = v;
        fill_entries(h, i, j + 1, out);
    }
    h.matrix[i][j] = 0;
}

fn generators(g: &GramLattice, gm: &[Vec<i128>]) -> Vec<i128> {
    let n = gm.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        if g.kind == FormKind::Symmetric {
            out.push(gm[i][i] / 2);
        }
        for j in i + 1..n {
            out.push(gm[i][j]);
        }
    }
    out
}

/// `ord_p` of the norm ideal of the lattice spanned by `basis`; `None` if the form vanishes on it.
pub fn norm_ord(g: &GramLattice, basis: &HnfBasis, p: u64) -> Option<u32> {
    generators(g, &g.gram_of(basis)).into_iter().filter_map(|x| ord_p(x, p)).min()
}

/// Kernel basis of `m` over `F_p`.
fn kernel_mod_p(m: &[Vec<i64>], p: i64) -> Vec<Vec<i64>> {
    let n = m.len();
    let mut a: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let inv = |x: i64| -> i64 {
        let mut r = 1i64;
        let (mut b, mut e) = (x, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(r) = (row..n).find(|&r| a[r][col] != 0) else { continue };
        a.swap(row, r);
        let iv = inv(a[row][col]);
        for x in a[row].iter_mut() {
            *x = *x * iv % p;
        }
        for r2 in 0..n {
            if r2 != row && a[r2][col] != 0 {
                let f = a[r2][col];
                for c in 0..n {
                    a[r2][c] = (a[r2][c] - f * a[row][c]).rem_euclid(p);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0i64; n];
            v[fc] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = (-a[ri][fc]).rem_euclid(p);
            }
            v
        })
        .collect()
}

/// Whether no overlattice `Λ ⊂ M ⊂ p^{-1}Λ` with `[M:Λ] = p` has the same norm.
pub fn is_maximal(g: &GramLattice, basis: &HnfBasis, p: u64) -> bool {
    let gm = g.gram_of(basis);
    let Some(m) = generators(g, &gm).into_iter().filter_map(|x| ord_p(x, p)).min() else {
        return false;
    };
    let pm = (p as i128).pow(m);
    let reduced: Vec<Vec<i64>> =
        gm.iter().map(|r| r.iter().map(|&x| ((x / pm) % p as i128) as i64).collect()).collect();
    let ker = kernel_mod_p(&reduced, p as i64);
    if ker.is_empty() {
        return true;
    }
    if g.kind == FormKind::Alternating {
        return false;
    }
    // Q(v)/p^2 must stay in p^m for some line v of the kernel.
    let k = ker.len();
    let n = gm.len();
    let total = (p as u128).pow(k as u32);
    for code in 1..total {
        let mut coeffs = vec![0i64; k];
        let mut c = code;
        for x in coeffs.iter_mut() {
            *x = (c % p as u128) as i64;
            c /= p as u128;
        }
        if coeffs.iter().rev().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        let mut v = vec![0i128; n];
        for (t, kv) in coeffs.iter().zip(&ker) {
            for i in 0..n {
                v[i] = (v[i] + *t as i128 * kv[i] as i128).rem_euclid(p as i128);
            }
        }
        let mut bb = 0i128;
        for i in 0..n {
            for j in 0..n {
                bb += v[i] * gm[i][j] * v[j];
            }
        }
        let q = bb / 2;
        if ord_p(q, p).is_none_or(|o| o >= m + 2) {
            return false;
        }
    }
    true
}

/// Maximal sublattices by `(index exponent k, norm exponent m)`: index `p^k`, norm ratio `p^m`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LatticeCount {
    pub p: u64,
    pub counts: BTreeMap<(u32, u32), u64>,
}

#[derive(Serialize, Deserialize)]
struct CountRecord {
    index: u128,
    #[serde(rename = "indexExp")]
    index_exp: u32,
    #[serde(rename = "normExp")]
    norm_exp: u32,
    count: u64,
}

impl Serialize for LatticeCount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let recs: Vec<CountRecord> = self
            .counts
            .iter()
            .map(|(&(k, m), &c)| CountRecord {
                index: (self.p as u128).saturating_pow(k),
                index_exp: k,
                norm_exp: m,
                count: c,
            })
            .collect();
        #[derive(Serialize)]
        struct Doc<'a> {
            p: u64,
            counts: &'a [CountRecord],
        }
        Doc { p: self.p, counts: &recs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeCount {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Doc {
            p: u64,
            counts: Vec<CountRecord>,
        }
        let doc = Doc::deserialize(d)?;
        Ok(LatticeCount { p: doc.p, counts: doc.counts.into_iter().map(|r| ((r.index_exp, r.norm_exp), r.count)).collect() })
    }
}

impl LatticeCount {
    pub fn get(&self, index_exp: u32, norm_exp: u32) -> u64 {
        self.counts.get(&(index_exp, norm_exp)).copied().unwrap_or(0)
    }

    pub fn total_at_index(&self, index_exp: u32) -> u64 {
        self.counts.iter().filter(|((k, _), _)| *k == index_exp).map(|(_, c)| c).sum()
    }
}

struct Search<'a> {
    g: &'a GramLattice,
    p: u64,
    m: u32,
    pm: i128,
}

impl Search<'_> {
    fn column_ok(&self, cols: &[Vec<i64>], c: &[i64], dj: i64) -> bool {
        let n = c.len();
        let j = cols.len();
        // p^m e_j must already lie in the span of the first j+1 columns
        let f = self.pm as i64 / dj;
        let mut r: Vec<i128> = (0..j).map(|i| -(f as i128) * c[i] as i128).collect();
        for t in (0..j).rev() {
            let d = cols[t][t] as i128;
            if r[t] % d != 0 {
                return false;
            }
            let q = r[t] / d;
            for i in 0..=t {
                r[i] -= q * cols[t][i] as i128;
            }
        }
        let g = self.g.gram();
        let sc: Vec<i128> =
            (0..n).map(|r| (0..=j).map(|k| g[r][k] as i128 * c[k] as i128).sum()).collect();
        if self.g.kind() == FormKind::Symmetric {
            let cc: i128 = (0..=j).map(|k| c[k] as i128 * sc[k]).sum();
            if (cc / 2) % self.pm != 0 {
                return false;
            }
        }
        cols.iter().all(|b| (0..n).map(|k| b[k] as i128 * sc[k]).sum::<i128>() % self.pm == 0)
    }

    /// Depth-first over columns; returns `(visited nodes, leaves by index exponent)`.
    fn run(&self, ks: &[u32], cap: u64) -> Result<(u64, Vec<(u32, u64)>)> {
        let n = ks.len();
        let d: Vec<i64> = ks.iter().map(|&k| (self.p as i64).pow(k)).collect();
        let mut visited = 0u64;
        let mut found = 0u64;
        let mut cols: Vec<Vec<i64>> = Vec::with_capacity(n);
        self.dfs(&d, &mut cols, &mut visited, &mut found, cap)?;
        let k: u32 = ks.iter().sum();
        Ok((visited, vec![(k, found)]))
    }

    fn dfs(&self, d: &[i64], cols: &mut Vec<Vec<i64>>, visited: &mut u64, found: &mut u64, cap: u64) -> Result<()> {
        let n = d.len();
        let j = cols.len();
        if j == n {
            self.leaf(d, cols, found);
            return Ok(());
        }
        let mut c = vec![0i64; n];
        c[j] = d[j];
        loop {
            *visited += 1;
            if *visited > cap {
                return Err(Error::Resource(format!("enumeration exceeded the cap of {cap} nodes")));
            }
            if self.column_ok(cols, &c, d[j]) {
                cols.push(c.clone());
                self.dfs(d, cols, visited, found, cap)?;
                cols.pop();
            }
            // odometer over rows 0..j, row i ranging over [0, d_i)
            let mut i = 0;
            loop {
                if i == j {
                    return Ok(());
                }
                c[i] += 1;
                if c[i] < d[i] {
                    break;
                }
                c[i] = 0;
                i += 1;
            }
        }
    }

    fn leaf(&self, d: &[i64], cols: &[Vec<i64>], found: &mut u64) {
        let n = d.len();
        let matrix: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
        let h = HnfBasis { matrix };
        let pm = self.pm as i64;
        for i in 0..n {
            let mut e = vec![0i64; n];
            e[i] = pm;
            if !h.contains(&e) {
                return;
            }
        }
        if norm_ord(self.g, &h, self.p) == Some(self.m) && is_maximal(self.g, &h, self.p) {
            *found += 1;
        }
    }
}

fn exponent_tuples(n: usize, max: u32, sum: Option<u32>) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        let s: u32 = cur.iter().sum();
        if sum.is_none_or(|t| t == s) {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            cur[i] += 1;
            if cur[i] <= max {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Maximal sublattices of norm ratio exactly `p^m`, optionally only those of index `p^k`.
pub fn count_maximal_at(g: &GramLattice, p: u64, m: u32, index_exp: Option<u32>, cap: u64) -> Result<BTreeMap<u32, u64>> {
    if !is_prime(p) {
        return Err(Error::Usage(format!("{p} is not a prime")));
    }
    let pm = (p as i128)
        .checked_pow(m)
        .filter(|&x| x < (1i128 << 40))
        .ok_or_else(|| Error::Resource(format!("p^{m} is too large")))?;
    let search = Search { g, p, m, pm };
    let tuples = exponent_tuples(g.n(), m, index_exp);
    let results: Vec<Result<(u64, Vec<(u32, u64)>)>> = tuples.par_iter().map(|ks| search.run(ks, cap)).collect();
    let mut out = BTreeMap::new();
    let mut visited = 0u64;
    for r in results {
        let (v, leaves) = r?;
        visited += v;
        if visited > cap {
            return Err(Error::Resource(format!("enumeration exceeded the cap of {cap} nodes")));
        }
        for (k, c) in leaves {
            if c > 0 {
                *out.entry(k).or_insert(0) += c;
            }
        }
    }
    Ok(out)
}

/// Counts for every norm exponent `m ≤ max_norm`.
pub fn count_maximal(g: &GramLattice, p: u64, max_norm: u32, cap: u64) -> Result<LatticeCount> {
    let mut counts = BTreeMap::new();
    for m in 0..=max_norm {
        for (k, c) in count_maximal_at(g, p, m, None, cap)? {
            counts.insert((k, m), c);
        }
    }
    Ok(LatticeCount { p, counts })
}

/// `ν_{Z^ℓ}(d, δ)`: sublattices with `Z^ℓ/L ≅ Z/d ⊕ ⊕_j Z/δ_j`.
pub fn nu_elementary(ell: usize, d: u64, delta: &[u64]) -> Result<u64> {
    let mut cache = HashMap::new();
    nu_cached(ell, d, delta, &mut cache)
}

type SnfTally = HashMap<Vec<u128>, u64>;

fn nu_cached(ell: usize, d: u64, delta: &[u64], cache: &mut HashMap<(usize, u64), SnfTally>) -> Result<u64> {
    if ell == 0 || delta.len() + 1 != ell {
        return Err(Error::Usage(format!("need ℓ-1 = {} entries in δ", ell.saturating_sub(1))));
    }
    let mut chain = vec![d];
    chain.extend_from_slice(delta);
    if chain.contains(&0) || chain.windows(2).any(|w| w[0] % w[1] != 0) {
        return Err(Error::Usage("δ must form a divisor chain below d".into()));
    }
    let index: u64 = chain.iter().product();
    if let std::collections::hash_map::Entry::Vacant(e) = cache.entry((ell, index)) {
        let mut tally = SnfTally::new();
        for h in enum_sublattices(ell, index, DEFAULT_CAP)? {
            *tally.entry(h.invariant_factors()).or_insert(0) += 1;
        }
        e.insert(tally);
    }
    let mut key: Vec<u128> = chain.iter().map(|&x| x as u128).collect();
    key.reverse();
    Ok(cache[&(ell, index)].get(&key).copied().unwrap_or(0))
}

fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

fn divisor_chains(top: u64, len: usize) -> Vec<Vec<u64>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for d in divisors(top) {
        for mut rest in divisor_chains(d, len - 1) {
            rest.insert(0, d);
            out.push(rest);
        }
    }
    out
}

fn rat_pow(b: u64, e: i64) -> BigRational {
    let v = BigRational::from_integer(BigInt::from(b).pow(e.unsigned_abs() as u32));
    if e < 0 {
        v.recip()
    } else {
        v
    }
}

/// `Σ_{d|m} d^{a} Σ_δ ν_{Z^ℓ}(d,δ) ∏_j δ_j^{c_j}`.
pub fn symplectic_rhs(ell: usize, m: u64, a: i64, c: &[i64]) -> Result<BigRational> {
    if c.len() + 1 != ell {
        return Err(Error::Usage("need ℓ-1 exponents".into()));
    }
    let mut cache = HashMap::new();
    let mut acc = BigRational::zero();
    for d in divisors(m) {
        let mut inner = BigRational::zero();
        for chain in divisor_chains(d, ell - 1) {
            let nu = nu_cached(ell, d, &chain, &mut cache)?;
            if nu == 0 {
                continue;
            }
            let mut w = BigRational::from_integer(BigInt::from(nu));
            for (j, &dj) in chain.iter().enumerate() {
                w *= rat_pow(dj, c[j]);
            }
            inner += w;
        }
        acc += rat_pow(d, a) * inner;
    }
    Ok(acc)
}

/// Number of maximal sublattices of index `m^ℓ` in the split symplectic `Z^{2ℓ}`, from the
/// local factors (multiplicative over the primes of `m`).
pub fn symplectic_count(ell: u32, m: u64) -> Result<BigInt> {
    let mut acc = BigInt::one();
    let mut rest = m;
    for p in prime_factors(m as u128) {
        let mut k = 0usize;
        while rest.is_multiple_of(p) {
            rest /= p;
            k += 1;
        }
        let deg = 2 * ell as usize * k;
        let series = localzeta::local_series_coeffs(&LocalInvariants::symplectic(p, ell)?, deg)?;
        acc *= &series[deg];
    }
    Ok(acc)
}

/// Both sides of the symplectic elementary-divisor identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub ell: u32,
    pub m: u64,
    #[serde(with = "crate::exactpoly::decimal")]
    pub lhs: BigInt,
    #[serde(with = "crate::exactpoly::decimal")]
    pub rhs: BigRational,
    pub holds: bool,
}

/// The identity with weights `d^{ℓ(ℓ-1)/2} ∏ δ_j^{j-ℓ}` as printed.
pub fn crosscheck_symplectic(ell: u32, m: u64) -> Result<CrossCheck> {
    let l = ell as i64;
    let c: Vec<i64> = (1..l).map(|j| j - l).collect();
    crosscheck_with(ell, m, l * (l - 1) / 2, &c)
}

/// The identity with weights `d ∏ δ_j^{j+1}`, which the local factors satisfy.
pub fn crosscheck_corrected(ell: u32, m: u64) -> Result<CrossCheck> {
    let c: Vec<i64> = (1..ell as i64).map(|j| j + 1).collect();
    crosscheck_with(ell, m, 1, &c)
}

/// The identity with arbitrary weights `d^a ∏ δ_j^{c_j}`.
pub fn crosscheck_with(ell: u32, m: u64, a: i64, c: &[i64]) -> Result<CrossCheck> {
    if ell == 0 || m == 0 {
        return Err(Error::Usage("need ℓ ≥ 1 and m ≥ 1".into()));
    }
    let lhs = symplectic_count(ell, m)?;
    let rhs = symplectic_rhs(ell as usize, m, a, c)?;
    let holds = rhs == BigRational::from_integer(lhs.clone());
    Ok(CrossCheck { ell, m, lhs, rhs, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_counts() {
        assert_eq!(enum_sublattices(2, 3, DEFAULT_CAP).unwrap().len(), 4);
        assert_eq!(enum_sublattices(1, 12, DEFAULT_CAP).unwrap().len(), 1);
        assert_eq!(enum_sublattices(3, 4, DEFAULT_CAP).unwrap().len(), 35);
        assert!(matches!(enum_sublattices(3, 4, 10), Err(Error::Resource(_))));
    }

    #[test]
    fn norm_examples() {
        let h = GramLattice::split_orthogonal(1);
        assert_eq!(norm_ord(&h, &HnfBasis::identity(2), 3), Some(0));
        assert_eq!(norm_ord(&h, &HnfBasis::diag(&[3, 3]), 3), Some(2));
        assert!(is_maximal(&h, &HnfBasis::identity(2), 5));
        assert!(is_maximal(&h, &HnfBasis::diag(&[1, 9]), 3));
        assert_eq!(norm_ord(&h, &HnfBasis::diag(&[1, 9]), 3), Some(2));
        let b1 = GramLattice::odd_orthogonal(1);
        assert!(is_maximal(&b1, &HnfBasis::identity(3), 2));
        assert_eq!(norm_ord(&b1, &HnfBasis::diag(&[1, 1, 2]), 2), Some(0));
        assert!(!is_maximal(&b1, &HnfBasis::diag(&[1, 1, 2]), 2));
    }

    #[test]
    fn small_counts() {
        let d2 = GramLattice::split_orthogonal(2);
        assert_eq!(count_maximal_at(&d2, 2, 1, None, DEFAULT_CAP).unwrap().get(&2), Some(&6));
        let c2 = GramLattice::split_symplectic(2);
        assert_eq!(count_maximal_at(&c2, 2, 1, None, DEFAULT_CAP).unwrap().get(&2), Some(&15));
        let b1 = GramLattice::odd_orthogonal(1);
        assert_eq!(count_maximal_at(&b1, 2, 1, None, DEFAULT_CAP).unwrap().get(&2), Some(&3));
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu_elementary(2, 3, &[1]).unwrap(), 4);
        assert_eq!(nu_elementary(2, 3, &[3]).unwrap(), 1);
        assert_eq!(nu_elementary(1, 7, &[]).unwrap(), 1);
    }

    #[test]
    fn gram_file_round_trip() {
        let g = GramLattice::split_symplectic(2);
        assert_eq!(GramLattice::parse(&g.to_text()).unwrap(), g);
        assert!(GramLattice::parse("2\n0 1\n1 0\nweird\n").is_err());
    }
}
