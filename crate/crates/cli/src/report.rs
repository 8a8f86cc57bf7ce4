//! Output documents and their text and LaTeX renderings.

use std::fmt::Write as _;

use maxlat::exactpoly::{format_exp2, HalfLaurent, SeriesPoly, TermTable};
use maxlat::globalzeta::{GlobalSpec, PartialSum, PoleReport};
use maxlat::latoracle::{CrossCheck, LatticeCount};
use maxlat::localzeta::{LocalFactor, LocalInvariants};
use maxlat::verify::VerifyReport;
use serde::{Deserialize, Serialize};

pub trait Render: Serialize {
    fn text(&self) -> String;
    fn latex(&self) -> String;
}

fn latex_set(k: &[u32]) -> String {
    if k.is_empty() {
        return "\\emptyset".into();
    }
    let parts: Vec<String> = k.iter().map(u32::to_string).collect();
    format!("\\{{{}\\}}", parts.join(","))
}

fn text_set(k: &[u32]) -> String {
    let parts: Vec<String> = k.iter().map(u32::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentRow {
    pub ell: u32,
    pub k: Vec<u32>,
    pub w: HalfLaurent,
    #[serde(rename = "aPlus")]
    pub a_plus: i64,
    #[serde(rename = "aMinus")]
    pub a_minus: i64,
    pub b: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentTables {
    pub rows: Vec<DescentRow>,
}

impl Render for DescentTables {
    fn text(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let _ = writeln!(s, "ℓ={} K={}  w={}  a+={}  a-={}  b={}", r.ell, text_set(&r.k), r.w, r.a_plus, r.a_minus, r.b);
        }
        s
    }

    fn latex(&self) -> String {
        let mut s = String::from("\\begin{tabular}{c|c|c|c|c|c}\n\\ell & K & w_{\\ell,K}(q) & a^{(+1)} & a^{(-1)} & b \\\\\n\\hline\n");
        for r in &self.rows {
            let _ = writeln!(s, "{} & {} & {} & {} & {} & {} \\\\", r.ell, latex_set(&r.k), r.w.to_latex(), r.a_plus, r.a_minus, r.b);
        }
        s.push_str("\\end{tabular}\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AshDoc {
    pub ell: u32,
    /// `None` for the trivariate polynomial, which is then given term by term.
    pub eps: Option<i32>,
    #[serde(default)]
    pub polynomial: Option<SeriesPoly>,
    #[serde(default)]
    pub terms: Option<TermTable>,
}

impl AshDoc {
    fn body(&self) -> (String, String) {
        match (&self.polynomial, &self.terms) {
            (Some(p), _) => (p.to_string(), p.to_latex()),
            (None, Some(t)) => {
                let m = t.to_mpoly().to_string();
                (m.clone(), m)
            }
            (None, None) => ("0".into(), "0".into()),
        }
    }
}

impl Render for AshDoc {
    fn text(&self) -> String {
        format!("{}\n", self.body().0)
    }

    fn latex(&self) -> String {
        format!("{}\n", self.body().1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TotalAshDoc {
    pub ell: u32,
    pub a: String,
    pub b: String,
    pub n: i64,
    pub polynomial: SeriesPoly,
    #[serde(default)]
    pub p: Option<u64>,
    /// Coefficients in `Y` at `X = p`.
    #[serde(default)]
    pub values: Option<Vec<String>>,
}

impl Render for TotalAshDoc {
    fn text(&self) -> String {
        let mut s = format!("{}\n", self.polynomial);
        if let (Some(p), Some(v)) = (self.p, &self.values) {
            let _ = writeln!(s, "at X={p}: [{}]", v.join(", "));
        }
        s
    }

    fn latex(&self) -> String {
        format!("{}\n", self.polynomial.to_latex())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalZetaDoc {
    #[serde(default)]
    pub invariants: Option<LocalInvariants>,
    pub factor: LocalFactor,
    /// Coefficients of `Y^d`, `Y = p^{-s/2}`; entry `d` counts lattices of index `p^{d/2}`.
    pub series: Vec<String>,
}

impl Render for LocalZetaDoc {
    fn text(&self) -> String {
        let mut s = String::new();
        if let Some(inv) = &self.invariants {
            let _ = writeln!(
                s,
                "p={} ℓ={} n0={} A={} B={} f={} {:?}",
                inv.p,
                inv.ell,
                inv.n0,
                format_exp2(inv.a2),
                format_exp2(inv.b2),
                inv.f,
                inv.kind
            );
        }
        let _ = writeln!(s, "numerator: {}", self.factor.numerator);
        let _ = writeln!(
            s,
            "denominator: prod_r (1 - p^e_r Y^{}) with e = {:?}",
            self.factor.denominator_y_degree, self.factor.denominator_exponents
        );
        for (d, c) in self.series.iter().enumerate() {
            if c != "0" {
                let _ = writeln!(s, "Y^{d}: {c}");
            }
        }
        s
    }

    fn latex(&self) -> String {
        format!("{}\n", self.factor.to_latex())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub s: String,
    pub value: f64,
    #[serde(rename = "tailBound")]
    pub tail_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalZetaDoc {
    pub spec: GlobalSpec,
    /// `c(1), …, c(M)`; `null` where a prime factor exceeds the prime bound.
    #[serde(default)]
    pub coeffs: Option<Vec<Option<String>>>,
    #[serde(default)]
    pub pole: Option<PoleReport>,
    #[serde(rename = "partialSum", default)]
    pub partial_sum: Option<PartialSum>,
    #[serde(default)]
    pub correction: Option<Correction>,
}

impl Render for GlobalZetaDoc {
    fn text(&self) -> String {
        let mut s = String::new();
        if let Some(c) = &self.coeffs {
            let shown: Vec<String> = c.iter().map(|v| v.clone().unwrap_or_else(|| "?".into())).collect();
            let _ = writeln!(s, "coefficients: {}", shown.join(" "));
        }
        if let Some(r) = &self.pole {
            let _ = writeln!(s, "pole s0 = {} (order {})", r.s0, r.order);
            if let Some(p) = r.s0_printed {
                let _ = writeln!(s, "printed location: {p}");
            }
            let sq = if r.squared_series { " (square root of the squared-series residue)" } else { "" };
            let _ = writeln!(s, "leading coefficient: {:.10}{sq}", r.leading);
            let _ = writeln!(s, "without chain-rule factors: {:.10}", r.leading_literal);
            let _ = writeln!(s, "zeta part: {:.12}  Euler part: {:.10}", r.zeta_part, r.euler_part);
            if let Some(t) = r.tail_bound {
                let _ = writeln!(s, "tail estimate: {t:.3e} (primes ≤ {})", r.prime_bound);
            }
            if let Some(l) = r.l_one {
                let _ = writeln!(s, "L(1,χ) = {l:.12}");
            }
        }
        if let Some(p) = &self.partial_sum {
            let _ = writeln!(s, "sum_{{m<{}}} c(m) = {}  main term {:.3}  ratio {:.5}", p.x, p.exact, p.asymptotic, p.ratio);
        }
        if let Some(c) = &self.correction {
            let _ = writeln!(s, "Euler correction at s={}: {:.12}", c.s, c.value);
        }
        s
    }

    fn latex(&self) -> String {
        let mut s = String::new();
        if let Some(r) = &self.pole {
            let (n, d) = (r.s0.numer(), r.s0.denom());
            let s0 = if *d == 1 { n.to_string() } else { format!("\\frac{{{n}}}{{{d}}}") };
            let _ = writeln!(s, "s_0 = {s0}, \\quad \\operatorname{{ord}} = {}, \\quad c = {:.10}", r.order, r.leading);
        }
        if let Some(p) = &self.partial_sum {
            let _ = writeln!(s, "\\sum_{{m<{}}} c(m) = {}", p.x, p.exact);
        }
        if let Some(c) = &self.coeffs {
            let terms: Vec<String> = c
                .iter()
                .enumerate()
                .filter_map(|(i, v)| v.as_ref().filter(|v| *v != "0").map(|v| format!("{v}\\cdot {}^{{-s}}", i + 1)))
                .collect();
            let _ = writeln!(s, "{}+\\cdots", terms.join("+"));
        }
        s
    }
}

impl Render for LatticeCount {
    fn text(&self) -> String {
        let mut s = String::new();
        for (&(k, m), &c) in &self.counts {
            let _ = writeln!(s, "index {}^{k}, norm ratio {}^{m}: {c}", self.p, self.p);
        }
        s
    }

    fn latex(&self) -> String {
        let mut s = String::from("\\begin{tabular}{c|c|c}\n\\text{index} & \\text{norm ratio} & \\# \\\\\n\\hline\n");
        for (&(k, m), &c) in &self.counts {
            let _ = writeln!(s, "{p}^{{{k}}} & {p}^{{{m}}} & {c} \\\\", p = self.p);
        }
        s.push_str("\\end{tabular}\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckDoc {
    pub weights: String,
    pub checks: Vec<CrossCheck>,
}

impl Render for CrosscheckDoc {
    fn text(&self) -> String {
        let mut s = format!("weights {}\n", self.weights);
        for c in &self.checks {
            let _ = writeln!(s, "ℓ={} m={}: {} vs {} {}", c.ell, c.m, c.lhs, c.rhs, if c.holds { "ok" } else { "MISMATCH" });
        }
        s
    }

    fn latex(&self) -> String {
        let mut s = String::from("\\begin{tabular}{c|c|c}\nm & \\text{count} & \\text{weighted sum} \\\\\n\\hline\n");
        for c in &self.checks {
            let _ = writeln!(s, "{} & {} & {} \\\\", c.m, c.lhs, c.rhs);
        }
        s.push_str("\\end{tabular}\n");
        s
    }
}

impl Render for VerifyReport {
    fn text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "[{}] {}: {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.module, c.name, c.detail);
        }
        let _ = writeln!(s, "\nprinted displays that disagree with the engine:");
        for e in &self.ledger {
            let _ = writeln!(s, "  {}: {}", e.id, e.display);
            let _ = writeln!(s, "    printed: {}", e.printed);
            let _ = writeln!(s, "    engine:  {}", e.engine);
            if let Some(o) = &e.oracle {
                let _ = writeln!(
                    s,
                    "    oracle:  {} lattices of index {}^{} (engine {}, printed {}) -> {:?}",
                    o.count, o.p, o.index_exp, o.engine_predicts, o.printed_predicts, o.verdict
                );
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(s, "\n{passed}/{} invariants hold", self.checks.len());
        s
    }

    fn latex(&self) -> String {
        let mut s = String::from("\\begin{tabular}{l|l|c}\n\\text{module} & \\text{identity} & \\\\\n\\hline\n");
        for c in &self.checks {
            let _ = writeln!(s, "{} & {} & {} \\\\", c.module, c.name.replace('_', "\\_"), if c.passed { "\\checkmark" } else { "\\times" });
        }
        s.push_str("\\end{tabular}\n");
        s
    }
}
