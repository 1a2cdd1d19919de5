//! Smoothing cofactors and the conformality equation.
//!
//! Two piecewise polynomials on cells sharing the line `l = 0` join with
//! `C^r` smoothness exactly when their difference is `l^(r+1) q` for some
//! polynomial cofactor `q`. Around an interior vertex the cofactors satisfy
//! `sum_l l^(r+1) q_l = 0`. This module checks both conditions exactly,
//! computes the solution space of the conformality equation by exact
//! elimination, and evaluates the closed-form dimension count for comparison.

mod linalg;
pub mod scan;

use std::io::Write;
use std::ops::RangeInclusive;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::base_splines::{Monomial, Poly2};
use crate::{Error, Result};

pub use linalg::{null_space, rank_fraction_free};
pub use scan::{numeric_smoothness_scan, EdgeReport, EdgeSamplePlan, PiecewiseField, ScanReport};

/// The linear form `alpha x + beta y`, scaled so that the first nonzero
/// coefficient is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearForm {
    alpha: BigRational,
    beta: BigRational,
}

impl LinearForm {
    pub fn new(alpha: BigRational, beta: BigRational) -> Result<Self> {
        if !alpha.is_zero() {
            let beta = beta / &alpha;
            Ok(Self {
                alpha: BigRational::one(),
                beta,
            })
        } else if !beta.is_zero() {
            Ok(Self {
                alpha: BigRational::zero(),
                beta: BigRational::one(),
            })
        } else {
            Err(Error::Argument("linear form with alpha = beta = 0".into()))
        }
    }

    pub fn from_ints(alpha: i64, beta: i64) -> Result<Self> {
        Self::new(
            BigRational::from_integer(alpha.into()),
            BigRational::from_integer(beta.into()),
        )
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn to_poly(&self) -> Poly2 {
        Poly2::linear(self.alpha.clone(), self.beta.clone())
    }

    /// True when both forms describe the same line through the origin.
    pub fn same_slope(&self, other: &LinearForm) -> bool {
        &self.alpha * &other.beta == &other.alpha * &self.beta
    }

    /// Exact quotient `p / l`, or `None` when `l` does not divide `p`.
    pub fn divide(&self, p: &Poly2) -> Option<Poly2> {
        if p.is_zero() {
            return Some(Poly2::zero());
        }
        if self.alpha.is_zero() {
            // l = y
            let mut q = Poly2::zero();
            for (&(a, b), c) in p.terms() {
                if b == 0 {
                    return None;
                }
                q.add_term((a, b - 1), c.clone());
            }
            return Some(q);
        }
        // l = x - root with root = -beta y; synthetic division in x over Q[y]
        let top = p.terms().map(|(&(a, _), _)| a).max()?;
        let mut coeffs: Vec<Poly2> = vec![Poly2::zero(); top as usize + 1];
        for (&(a, b), c) in p.terms() {
            coeffs[a as usize].add_term((0, b), c.clone());
        }
        let root = Poly2::monomial((0, 1), -self.beta.clone());
        let mut q_coeffs = vec![Poly2::zero(); top as usize];
        let mut carry = Poly2::zero();
        for a in (1..=top as usize).rev() {
            carry = &coeffs[a] + &(&root * &carry);
            q_coeffs[a - 1] = carry.clone();
        }
        let remainder = &coeffs[0] + &(&root * &carry);
        if !remainder.is_zero() {
            return None;
        }
        let mut q = Poly2::zero();
        for (a, c) in q_coeffs.iter().enumerate() {
            for (&(_, b), v) in c.terms() {
                q.add_term((a as u32, b), v.clone());
            }
        }
        Some(q)
    }
}

/// Outcome of the smoothing-cofactor test across one partition line.
#[derive(Debug, Clone, PartialEq)]
pub struct CofactorResult {
    pub divides: bool,
    pub quotient: Option<Poly2>,
}

/// Tests whether `p_i - p_j` is divisible by `l^(r+1)` and returns the
/// cofactor when it is.
pub fn check_smooth_cofactor(p_i: &Poly2, p_j: &Poly2, l: &LinearForm, r: u32) -> CofactorResult {
    let mut rest = p_i - p_j;
    for _ in 0..=r {
        match l.divide(&rest) {
            Some(q) => rest = q,
            None => {
                return CofactorResult {
                    divides: false,
                    quotient: None,
                }
            }
        }
    }
    CofactorResult {
        divides: true,
        quotient: Some(rest),
    }
}

/// Checks `sum_l l^(r+1) q_l == 0` exactly.
pub fn verify_conformality(forms: &[LinearForm], cofactors: &[Poly2], r: u32) -> Result<bool> {
    if forms.len() != cofactors.len() {
        return Err(Error::Argument(format!(
            "{} forms but {} cofactors",
            forms.len(),
            cofactors.len()
        )));
    }
    let mut sum = Poly2::zero();
    for (l, q) in forms.iter().zip(cofactors) {
        sum = &sum + &(&l.to_poly().pow(r + 1) * q);
    }
    Ok(sum.is_zero())
}

/// `N` lines through a vertex with degree `n` and smoothness `r`.
#[derive(Debug, Clone)]
pub struct ConformalityProblem {
    forms: Vec<LinearForm>,
    degree: u32,
    smoothness: u32,
}

impl ConformalityProblem {
    pub fn new(forms: Vec<LinearForm>, degree: u32, smoothness: u32) -> Result<Self> {
        if forms.len() < 2 {
            return Err(Error::Argument("conformality needs at least two lines".into()));
        }
        for i in 0..forms.len() {
            for j in i + 1..forms.len() {
                if forms[i].same_slope(&forms[j]) {
                    return Err(Error::Argument(format!("lines {i} and {j} have the same slope")));
                }
            }
        }
        Ok(Self {
            forms,
            degree,
            smoothness,
        })
    }

    /// Lines `x + (l-1) y` for `l = 1..=n_forms`.
    pub fn with_default_slopes(n_forms: usize, degree: u32, smoothness: u32) -> Result<Self> {
        let forms = (0..n_forms as i64)
            .map(|k| LinearForm::from_ints(1, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(forms, degree, smoothness)
    }

    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn smoothness(&self) -> u32 {
        self.smoothness
    }

    /// Maximal total degree of the cofactors, `None` when the space is empty.
    pub fn cofactor_degree(&self) -> Option<u32> {
        self.degree.checked_sub(self.smoothness + 1)
    }
}

/// Solution space of a conformality equation.
#[derive(Debug, Clone)]
pub struct ConformalitySolution {
    /// Nullity from the fraction-free rank.
    pub dimension: usize,
    /// One cofactor tuple per basis vector of the null space.
    pub basis: Vec<Vec<Poly2>>,
}

fn monomials_up_to(degree: u32) -> Vec<Monomial> {
    (0..=degree).flat_map(|t| (0..=t).map(move |b| (t - b, b))).collect()
}

/// Expands `sum_l l^(r+1) q_l == 0` in the monomial basis and solves it
/// exactly. The cofactors range over all polynomials of total degree at most
/// `n - r - 1`.
pub fn conformality_nullity(prob: &ConformalityProblem) -> ConformalitySolution {
    let Some(m) = prob.cofactor_degree() else {
        return ConformalitySolution {
            dimension: 0,
            basis: Vec::new(),
        };
    };
    let unknowns = monomials_up_to(m);
    let equations = monomials_up_to(prob.degree);
    let row_of = |mono: &Monomial| equations.iter().position(|e| e == mono).expect("degree bound");
    let cols = prob.forms.len() * unknowns.len();

    let mut matrix = vec![vec![BigRational::zero(); cols]; equations.len()];
    for (li, l) in prob.forms.iter().enumerate() {
        let power = l.to_poly().pow(prob.smoothness + 1);
        for (ui, &u) in unknowns.iter().enumerate() {
            let col = li * unknowns.len() + ui;
            let column = &power * &Poly2::monomial(u, BigRational::one());
            for (mono, c) in column.terms() {
                matrix[row_of(mono)][col] = c.clone();
            }
        }
    }

    let rank = rank_fraction_free(&matrix);
    let basis = null_space(&matrix, cols)
        .into_iter()
        .map(|v| {
            (0..prob.forms.len())
                .map(|li| {
                    Poly2::from_terms(
                        unknowns
                            .iter()
                            .enumerate()
                            .map(|(ui, &u)| (u, v[li * unknowns.len() + ui].clone())),
                    )
                })
                .collect()
        })
        .collect();
    ConformalitySolution {
        dimension: cols - rank,
        basis,
    }
}

/// Which floor term enters the second factor of the closed-form count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FormulaVariant {
    /// `floor((r+1)/(N-1))` in both places.
    A,
    /// `floor((r+1)/(N+1))` in the second factor.
    B,
}

/// Closed-form dimension of the conformality solution space,
/// `1/2 (n - r - d)_+ ((N-1) n - (N+1) r + (N-3) + (N-1) d')`,
/// with negative products clamped to zero. Odd products are halved with
/// floor division.
pub fn conformality_dimension_formula(n_forms: u32, degree: u32, smoothness: u32, variant: FormulaVariant) -> u64 {
    assert!(n_forms >= 2, "formula needs N >= 2");
    let (big_n, n, r) = (n_forms as i64, degree as i64, smoothness as i64);
    let d = (r + 1) / (big_n - 1);
    let d_second = match variant {
        FormulaVariant::A => d,
        FormulaVariant::B => (r + 1) / (big_n + 1),
    };
    let prefactor = n - r - d;
    if prefactor <= 0 {
        return 0;
    }
    let second = (big_n - 1) * n - (big_n + 1) * r + (big_n - 3) + (big_n - 1) * d_second;
    let product = prefactor * second;
    if product <= 0 {
        0
    } else {
        (product / 2) as u64
    }
}

/// One row of a dimension sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n_forms: u32,
    pub degree: u32,
    pub smoothness: u32,
    pub oracle_dim: usize,
    pub formula_a: u64,
    pub formula_b: u64,
}

impl SweepRow {
    pub fn compute(n_forms: u32, degree: u32, smoothness: u32) -> Result<Self> {
        let prob = ConformalityProblem::with_default_slopes(n_forms as usize, degree, smoothness)?;
        Ok(Self {
            n_forms,
            degree,
            smoothness,
            oracle_dim: conformality_nullity(&prob).dimension,
            formula_a: conformality_dimension_formula(n_forms, degree, smoothness, FormulaVariant::A),
            formula_b: conformality_dimension_formula(n_forms, degree, smoothness, FormulaVariant::B),
        })
    }

    pub fn agree_a(&self) -> bool {
        self.oracle_dim as u64 == self.formula_a
    }

    pub fn agree_b(&self) -> bool {
        self.oracle_dim as u64 == self.formula_b
    }
}

/// Every `(N, n, r)` combination of the ranges, `N` outermost.
pub fn conformality_sweep(
    n_forms: RangeInclusive<u32>,
    degrees: RangeInclusive<u32>,
    smoothness: RangeInclusive<u32>,
) -> Result<Vec<SweepRow>> {
    if *n_forms.start() < 2 || n_forms.is_empty() || degrees.is_empty() || smoothness.is_empty() {
        return Err(Error::Argument("sweep ranges must be nonempty with N >= 2".into()));
    }
    let mut rows = Vec::new();
    for big_n in n_forms {
        for n in degrees.clone() {
            for r in smoothness.clone() {
                rows.push(SweepRow::compute(big_n, n, r)?);
            }
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "N,n,r,oracle_dim,formula_A,formula_B,agree_A,agree_B")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.n_forms,
            row.degree,
            row.smoothness,
            row.oracle_dim,
            row.formula_a,
            row.formula_b,
            row.agree_a(),
            row.agree_b()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn normalization() {
        let l = LinearForm::new(q(2), q(6)).unwrap();
        assert_eq!((l.alpha().clone(), l.beta().clone()), (q(1), q(3)));
        let l = LinearForm::new(q(0), q(-5)).unwrap();
        assert_eq!((l.alpha().clone(), l.beta().clone()), (q(0), q(1)));
        assert!(LinearForm::new(q(0), q(0)).is_err());
    }

    #[test]
    fn cofactor_examples() {
        let x = LinearForm::from_ints(1, 0).unwrap();
        let p = Poly2::from_terms([((2, 0), q(3)), ((0, 1), q(1))]);
        let res = check_smooth_cofactor(&p, &p, &x, 2);
        assert!(res.divides);
        assert_eq!(res.quotient, Some(Poly2::zero()));

        let pj = Poly2::zero();
        let pi = Poly2::x().pow(2);
        let res = check_smooth_cofactor(&pi, &pj, &x, 1);
        assert!(res.divides);
        assert_eq!(res.quotient, Some(Poly2::one()));

        let res = check_smooth_cofactor(&Poly2::x(), &pj, &x, 1);
        assert!(!res.divides);
        assert!(res.quotient.is_none());
    }

    #[test]
    fn divide_by_y_and_slanted() {
        let y = LinearForm::from_ints(0, 3).unwrap();
        let p = &Poly2::y() * &Poly2::linear(q(2), q(5));
        assert_eq!(y.divide(&p), Some(Poly2::linear(q(2), q(5))));
        assert_eq!(y.divide(&Poly2::x()), None);

        let l = LinearForm::from_ints(1, -2).unwrap();
        let cof = Poly2::from_terms([((0, 0), q(7)), ((1, 1), q(-1))]);
        let p = &l.to_poly().pow(3) * &cof;
        let res = check_smooth_cofactor(&p, &Poly2::zero(), &l, 2);
        assert_eq!(res.quotient, Some(cof.clone()));
        // one power too many
        assert!(!check_smooth_cofactor(&p, &Poly2::zero(), &l, 3).divides);
    }

    #[test]
    fn conformality_checks() {
        let forms = vec![
            LinearForm::from_ints(1, 0).unwrap(),
            LinearForm::from_ints(0, 1).unwrap(),
            LinearForm::from_ints(1, 1).unwrap(),
        ];
        let zeros = vec![Poly2::zero(); 3];
        assert!(verify_conformality(&forms, &zeros, 1).unwrap());
        let single = vec![Poly2::one(), Poly2::zero(), Poly2::zero()];
        assert!(!verify_conformality(&forms, &single, 0).unwrap());
        assert!(verify_conformality(&forms, &zeros[..2], 0).is_err());
    }

    #[test]
    fn nullity_anchors() {
        let xy = vec![
            LinearForm::from_ints(1, 0).unwrap(),
            LinearForm::from_ints(0, 1).unwrap(),
        ];
        let prob = ConformalityProblem::new(xy, 1, 0).unwrap();
        assert_eq!(conformality_nullity(&prob).dimension, 0);

        let forms = vec![
            LinearForm::from_ints(1, 0).unwrap(),
            LinearForm::from_ints(0, 1).unwrap(),
            LinearForm::from_ints(1, 1).unwrap(),
        ];
        let prob = ConformalityProblem::new(forms.clone(), 3, 1).unwrap();
        let sol = conformality_nullity(&prob);
        assert_eq!(sol.dimension, 2);
        assert_eq!(sol.basis.len(), 2);
        for cof in &sol.basis {
            assert!(verify_conformality(&forms, cof, 1).unwrap());
        }

        for n in 0..=3 {
            let prob = ConformalityProblem::new(forms.clone(), n, n).unwrap();
            assert_eq!(conformality_nullity(&prob).dimension, 0);
        }
    }

    #[test]
    fn duplicate_slopes_rejected() {
        let forms = vec![
            LinearForm::from_ints(1, 2).unwrap(),
            LinearForm::from_ints(2, 4).unwrap(),
        ];
        assert!(matches!(ConformalityProblem::new(forms, 3, 1), Err(Error::Argument(_))));
    }

    #[test]
    fn formula_variants() {
        assert_eq!(conformality_dimension_formula(3, 3, 1, FormulaVariant::A), 2);
        assert_eq!(conformality_dimension_formula(3, 3, 1, FormulaVariant::B), 1);
        // n - r - d <= 0
        assert_eq!(conformality_dimension_formula(2, 2, 1, FormulaVariant::A), 0);
        assert_eq!(conformality_dimension_formula(4, 1, 1, FormulaVariant::B), 0);
    }

    #[test]
    fn sweep_csv_shape() {
        let rows = conformality_sweep(2..=4, 0..=5, 0..=3).unwrap();
        assert_eq!(rows.len(), 72);
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 73);
        assert!(text.starts_with("N,n,r,oracle_dim,formula_A,formula_B,agree_A,agree_B\n"));
        assert!(conformality_sweep(1..=3, 0..=2, 0..=1).is_err());
    }
}
