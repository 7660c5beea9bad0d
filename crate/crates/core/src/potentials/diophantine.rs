//! Validators for the two arithmetic conditions on a quasi-periodic
//! potential: the Diophantine lower bound on `|n1 + n2 α + n3 α²|` and the
//! rational-ratio condition on colinear frequency vectors.

use serde::Serialize;

use super::Alpha;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct A1Options {
    /// Exponent of the lower bound `(|n1|+|n2|+|n3|)^{-N0}`.
    pub n0: f64,
    /// Triples with `|n1|+|n2|+|n3| <= n1_floor` are exempt.
    pub n1_floor: u64,
    pub search_bound: u64,
    /// Treat exact zeros as admissible when α is a quadratic irrational.
    pub zero_branch: bool,
    /// Cap on the number of listed triples per category (counts are exact).
    pub max_listed: usize,
}

impl Default for A1Options {
    fn default() -> Self {
        Self { n0: 3.0, n1_floor: 5, search_bound: 60, zero_branch: true, max_listed: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A1Hit {
    pub triple: [i64; 3],
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A1Report {
    pub alpha: String,
    pub options: A1Options,
    pub violations: Vec<A1Hit>,
    pub violation_count: u64,
    /// Vanishing relations of a quadratic irrational (admissible).
    pub exact_zeros: Vec<[i64; 3]>,
    pub exact_zero_count: u64,
    /// α is rational and produced vanishing relations.
    pub degenerate: bool,
    /// Number of `(n2, n3)` pairs examined.
    pub pairs_screened: u64,
}

impl A1Report {
    pub fn passes(&self) -> bool {
        self.violation_count == 0
    }
}

/// Exhaustive search over `N1 < |n1|+|n2|+|n3| <= search_bound`.
///
/// For each `(n2, n3)` only the two integers `n1` nearest to
/// `-(n2 α + n3 α²)` can produce a value below 1; they are screened in
/// floating point and confirmed exactly.
pub fn check_a1(alpha: &Alpha, opts: A1Options) -> Result<A1Report> {
    if !alpha.value.is_finite() {
        return Err(Error::input("alpha is not finite"));
    }
    if !(opts.n0.is_finite() && opts.n0 > 0.0) {
        return Err(Error::input(format!("N0 = {} must be positive", opts.n0)));
    }
    if opts.n1_floor == 0 || opts.search_bound < opts.n1_floor {
        return Err(Error::input(format!(
            "need 1 <= N1 <= search bound, got N1 = {}, bound = {}",
            opts.n1_floor, opts.search_bound
        )));
    }
    let a = alpha.value;
    let a2 = a * a;
    let bound = opts.search_bound as i64;
    let mut rep = A1Report {
        alpha: alpha.source().to_string(),
        options: opts,
        violations: Vec::new(),
        violation_count: 0,
        exact_zeros: Vec::new(),
        exact_zero_count: 0,
        degenerate: false,
        pairs_screened: 0,
    };
    let quadratic = !alpha.is_rational();
    let loosest = ((opts.n1_floor + 1) as f64).powf(-opts.n0);
    for n2 in -bound..=bound {
        let rest = bound - n2.abs();
        for n3 in -rest..=rest {
            let x = n2 as f64 * a + n3 as f64 * a2;
            let margin = 64.0 * f64::EPSILON * (1.0 + x.abs());
            let fl = x.floor() as i64;
            let frac = x - x.floor();
            rep.pairs_screened += 1;
            if frac.min(1.0 - frac) > loosest + margin {
                continue;
            }
            for n1 in [-fl, -fl - 1] {
                let size = (n1.abs() + n2.abs() + n3.abs()) as u64;
                if size <= opts.n1_floor || size > opts.search_bound {
                    continue;
                }
                let threshold = (size as f64).powf(-opts.n0);
                if (n1 as f64 + x).abs() > threshold + margin {
                    continue;
                }
                let triple = [n1, n2, n3];
                let (value, zero) = alpha.poly_abs(triple);
                if zero && opts.zero_branch {
                    if quadratic {
                        rep.exact_zero_count += 1;
                        if rep.exact_zeros.len() < opts.max_listed {
                            rep.exact_zeros.push(triple);
                        }
                        continue;
                    }
                    rep.degenerate = true;
                }
                if value <= threshold {
                    rep.violation_count += 1;
                    if rep.violations.len() < opts.max_listed {
                        rep.violations.push(A1Hit { triple, value, threshold });
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// A frequency vector `s1 + α s2`.
pub type FreqPair = ([i64; 2], [i64; 2]);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColinearPair {
    pub s: FreqPair,
    pub r: FreqPair,
    pub rational_ratio: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A2Report {
    pub alpha: String,
    pub colinear: Vec<ColinearPair>,
    pub violations: Vec<ColinearPair>,
}

impl A2Report {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every pair of colinear vectors must have a rational length ratio.
///
/// Colinearity is the vanishing of `A + Bα + Cα²` (the cross product) and is
/// decided exactly. For colinear `s = c r` and a component `i` with
/// `r_i != 0`, `c = (s1_i + α s2_i)/(r1_i + α r2_i)` is rational exactly when
/// `s1_i r2_i = s2_i r1_i`, since `1, α` are independent over ℚ.
pub fn check_a2(alpha: &Alpha, set: &[FreqPair]) -> Result<A2Report> {
    if !alpha.models_irrational() {
        return Err(Error::input("the ratio condition needs an irrational alpha"));
    }
    if set.is_empty() {
        return Err(Error::input("empty frequency set"));
    }
    for &(s1, s2) in set {
        if s1 == [0, 0] && s2 == [0, 0] {
            return Err(Error::input("zero vector in frequency set"));
        }
        let neg = ([-s1[0], -s1[1]], [-s2[0], -s2[1]]);
        if !set.contains(&neg) {
            return Err(Error::input(format!("frequency set is not symmetric: missing {neg:?}")));
        }
    }
    let mut rep = A2Report { alpha: alpha.source().to_string(), colinear: Vec::new(), violations: Vec::new() };
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            let (s1, s2) = set[i];
            let (r1, r2) = set[j];
            let ca = s1[0] * r1[1] - s1[1] * r1[0];
            let cb = s1[0] * r2[1] + s2[0] * r1[1] - s1[1] * r2[0] - s2[1] * r1[0];
            let cc = s2[0] * r2[1] - s2[1] * r2[0];
            if !alpha.relation_vanishes([ca, cb, cc]) {
                continue;
            }
            let axis = if r1[0] != 0 || r2[0] != 0 { 0 } else { 1 };
            let rational_ratio = s1[axis] * r2[axis] == s2[axis] * r1[axis];
            let pair = ColinearPair { s: set[i], r: set[j], rational_ratio };
            if !rational_ratio {
                rep.violations.push(pair.clone());
            }
            rep.colinear.push(pair);
        }
    }
    Ok(rep)
}
