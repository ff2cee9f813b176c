//! Growth integrals of the coefficients against the counting functions of
//! a solution base, tabulated on a radial grid.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::counting::{integrated_counting, CountRecord, CountingFunction};
use super::fit::{growth_exponent_fit, MIN_SAMPLES};
use super::quadrature::{coefficient_integrals, CoefficientContext};
use crate::basis::wronskian;
use crate::error::{Error, Result};
use crate::function::{Func, LinearCombination};

/// Increasing radii in `(0, 1)` and the shrink factor `b` of `s(r) = 1 - b(1-r)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialGrid {
    radii: Vec<f64>,
    shrink: f64,
}

impl RadialGrid {
    pub fn new(radii: Vec<f64>, shrink: f64) -> Result<Self> {
        if !(shrink > 0.0 && shrink < 1.0) {
            return Err(Error::InvalidInput(format!(
                "shrink b = {shrink} must lie in (0, 1)"
            )));
        }
        if radii.is_empty() {
            return Err(Error::InvalidInput("radial grid is empty".into()));
        }
        let mut last = 0.0;
        for &r in &radii {
            if !(r > last && r < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "grid radii must increase within (0, 1), got {r}"
                )));
            }
            last = r;
        }
        Ok(Self { radii, shrink })
    }

    /// `count` radii from `r_min` to `r_max`, equispaced in `log 1/(1-r)`.
    pub fn geometric(r_min: f64, r_max: f64, count: usize, shrink: f64) -> Result<Self> {
        if !(0.0 < r_min && r_min < r_max && r_max < 1.0) || count < 2 {
            return Err(Error::InvalidInput(format!(
                "bad grid range [{r_min}, {r_max}] with {count} radii"
            )));
        }
        let (a, b) = ((1.0 - r_min).ln(), (1.0 - r_max).ln());
        let radii = (0..count)
            .map(|i| 1.0 - (a + (b - a) * i as f64 / (count - 1) as f64).exp())
            .collect();
        Self::new(radii, shrink)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn shrink(&self) -> f64 {
        self.shrink
    }

    pub fn s(&self, r: f64) -> f64 {
        1.0 - self.shrink * (1.0 - r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub r: f64,
    pub s_r: f64,
    /// `I_j(r)` for `j = 0..k-2`.
    pub integrals: Vec<f64>,
    /// `Σ_{j≤k} ∫_0^{s(r)} N(t, 0, f_j)/(1-t) dt`
    pub rhs_n_sum: f64,
    /// `Σ_{j<k} ∫_0^{s(r)} N(t, 0, f_j + f_k)/(1-t) dt`
    pub rhs_cross_sum: f64,
    /// `log²(e/(1-r))`
    pub log2_term: f64,
    /// `max_j I_j / (rhs_n_sum + rhs_cross_sum + log2_term)`
    pub ratio: f64,
    /// `Σ N(s(r), 0, f_j) + Σ N(s(r), 0, f_j + f_k)`
    pub corollary_n_sum: f64,
    /// `log(e/(1-r))`
    pub log_term: f64,
    /// `(max_j I_j / log_term) / (corollary_n_sum + log_term)`
    pub corollary_ratio: f64,
}

impl ReportRow {
    pub fn rhs_total(&self) -> f64 {
        self.rhs_n_sum + self.rhs_cross_sum + self.log2_term
    }
}

/// Counting data of one function of the base, at the shrunk radii `s(r)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountingSummary {
    pub label: String,
    pub origin_order: usize,
    pub zeros: usize,
    pub radius: f64,
    pub records: Vec<CountRecord>,
}

/// Exponents `e` with `column ≍ (1-r)^{-e}`, fitted on the rows of a radial window.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FittedExponents {
    pub integrals: Vec<Option<f64>>,
    pub rhs_n_sum: Option<f64>,
    pub rhs_cross_sum: Option<f64>,
    pub log2_term: Option<f64>,
    pub rhs_total: Option<f64>,
    pub corollary_n_sum: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillationReport {
    pub k: usize,
    pub shrink: f64,
    pub rows: Vec<ReportRow>,
    pub counting: Vec<CountingSummary>,
    /// Radii `[lo, hi]` of the rows entering `exponents`.
    pub fit_window: (f64, f64),
    pub exponents: FittedExponents,
}

/// Default fit window: the outer half of the grid in `log 1/(1-r)`, widened
/// to the last `MIN_SAMPLES` rows when that half is too sparse.
fn default_fit_window(radii: &[f64]) -> (f64, f64) {
    let (first, last) = (radii[0], radii[radii.len() - 1]);
    let mid = 1.0 - ((1.0 - first) * (1.0 - last)).sqrt();
    let inside = radii.iter().filter(|&&r| r >= mid).count();
    let lo = if inside >= MIN_SAMPLES {
        mid
    } else {
        radii[radii.len().saturating_sub(MIN_SAMPLES)]
    };
    (lo, last)
}

fn fit_column(
    rows: &[ReportRow],
    lo: f64,
    hi: f64,
    column: impl Fn(&ReportRow) -> f64,
) -> Option<f64> {
    let samples: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.r >= lo && r.r <= hi)
        .map(|r| (r.r, column(r)))
        .filter(|s| s.1 > 0.0)
        .collect();
    if samples.len() < MIN_SAMPLES {
        return None;
    }
    growth_exponent_fit(&samples).ok()
}

fn fit_all(rows: &[ReportRow], k: usize, lo: f64, hi: f64) -> FittedExponents {
    FittedExponents {
        integrals: (0..k - 1)
            .map(|j| fit_column(rows, lo, hi, |row| row.integrals[j]))
            .collect(),
        rhs_n_sum: fit_column(rows, lo, hi, |row| row.rhs_n_sum),
        rhs_cross_sum: fit_column(rows, lo, hi, |row| row.rhs_cross_sum),
        log2_term: fit_column(rows, lo, hi, |row| row.log2_term),
        rhs_total: fit_column(rows, lo, hi, ReportRow::rhs_total),
        corollary_n_sum: fit_column(rows, lo, hi, |row| row.corollary_n_sum),
        ratio: fit_column(rows, lo, hi, |row| row.ratio),
    }
}

impl OscillationReport {
    /// Exponents refitted on the rows with `lo ≤ r ≤ hi`.
    pub fn exponents_within(&self, lo: f64, hi: f64) -> FittedExponents {
        fit_all(&self.rows, self.k, lo, hi)
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec!["r".to_string(), "s_r".to_string()];
        cols.extend((0..self.k - 1).map(|j| format!("I_{j}")));
        cols.extend(["rhs_N_sum", "rhs_cross_sum", "log2_term", "ratio"].map(String::from));
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.csv_header();
        out.push('\n');
        for row in &self.rows {
            let mut fields = vec![row.r, row.s_r];
            fields.extend(&row.integrals);
            fields.extend([row.rhs_n_sum, row.rhs_cross_sum, row.log2_term, row.ratio]);
            let line: Vec<String> = fields.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Breakdown(e.to_string()))
    }
}

fn check_independent(base: &[Func]) -> Result<()> {
    let origin = Complex64::new(0.0, 0.0);
    let w = wronskian(base, origin)?;
    let k = base.len();
    let mut scale = 1.0;
    for g in base {
        let jet = g.jet_at(origin, k - 1)?;
        scale *= jet
            .derivative_values()
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
    }
    if !(w.norm() > 1e-12 * scale) {
        return Err(Error::Singular(w.norm()));
    }
    Ok(())
}

/// Tabulates the coefficient integrals `I_j(r)` against the counting terms
/// of the base `f_1..f_k` (given on the disc) and of `f_j + f_k`.
pub fn theorem2_report(
    base: &[Func],
    coefficients: &CoefficientContext,
    grid: &RadialGrid,
) -> Result<OscillationReport> {
    let k = base.len();
    if k < 2 {
        return Err(Error::InvalidInput(
            "the base needs at least two functions".into(),
        ));
    }
    let sums = (0..k - 1)
        .map(|j| {
            let one = Complex64::new(1.0, 0.0);
            Ok(Arc::new(LinearCombination::new(vec![
                (one, base[j].clone()),
                (one, base[k - 1].clone()),
            ])?) as Func)
        })
        .collect::<Result<Vec<_>>>()?;
    theorem2_report_with_sums(base, &sums, coefficients, grid)
}

/// Checks that `sum` agrees with `f + g` at a few points of the disc.
fn check_sum(f: &Func, g: &Func, sum: &Func) -> Result<()> {
    // off the origin, where a base function may vanish by its initial data
    for z in [
        Complex64::new(0.07, 0.43),
        Complex64::new(0.31, 0.17),
        Complex64::new(-0.23, -0.41),
    ] {
        let (lf, lg, ls) = (f.log_jet(z)?.0, g.log_jet(z)?.0, sum.log_jet(z)?.0);
        let m = lf.re.max(lg.re);
        let direct = (lf - m).exp() + (lg - m).exp();
        let given = (ls - m).exp();
        if !((direct - given).norm() <= 1e-9 * direct.norm().max(given.norm())) {
            return Err(Error::InvalidInput(format!(
                "sum function differs from f_j + f_k at {z}"
            )));
        }
    }
    Ok(())
}

/// [`theorem2_report`] with the sums `f_j + f_k` (`j < k`) supplied by the
/// caller, e.g. in a closed form that is cheaper to evaluate.
pub fn theorem2_report_with_sums(
    base: &[Func],
    sums: &[Func],
    coefficients: &CoefficientContext,
    grid: &RadialGrid,
) -> Result<OscillationReport> {
    let k = coefficients.order();
    if base.len() != k || sums.len() + 1 != k {
        return Err(Error::InvalidInput(format!(
            "order {k} needs {k} base functions and {} sums, got {} and {}",
            k - 1,
            base.len(),
            sums.len()
        )));
    }
    check_independent(base)?;
    for (j, sum) in sums.iter().enumerate() {
        check_sum(&base[j], &base[k - 1], sum)?;
    }
    let radii = grid.radii();
    let s_max = grid.s(*radii.last().expect("nonempty grid"));
    let count_radius = s_max + 5e-4 * (1.0 - s_max);

    let mut labelled: Vec<(String, Func)> = (0..k)
        .map(|j| (format!("f{}", j + 1), base[j].clone()))
        .collect();
    labelled.extend(
        sums.iter()
            .enumerate()
            .map(|(j, g)| (format!("f{}+f{k}", j + 1), g.clone())),
    );

    // independent work items, joined in a fixed order
    let (counts, integrals) = std::thread::scope(|scope| {
        let count_jobs: Vec<_> = labelled
            .iter()
            .map(|(_, g)| scope.spawn(move || integrated_counting(g.as_ref(), count_radius)))
            .collect();
        let integral_jobs: Vec<_> = (0..k - 1)
            .map(|j| scope.spawn(move || coefficient_integrals(coefficients, j, radii)))
            .collect();
        let counts = count_jobs
            .into_iter()
            .map(|h| h.join().expect("counting worker"))
            .collect::<Result<Vec<CountingFunction>>>();
        let integrals = integral_jobs
            .into_iter()
            .map(|h| h.join().expect("quadrature worker"))
            .collect::<Result<Vec<Vec<f64>>>>();
        (counts, integrals)
    });
    let (counts, integrals) = (counts?, integrals?);

    let mut rows = Vec::with_capacity(radii.len());
    for (i, &r) in radii.iter().enumerate() {
        let s = grid.s(r);
        let mut rhs_n_sum = 0.0;
        let mut rhs_cross_sum = 0.0;
        let mut corollary_n_sum = 0.0;
        for (idx, n) in counts.iter().enumerate() {
            let term = n.integral_over_one_minus(s)?;
            if idx < k {
                rhs_n_sum += term;
            } else {
                rhs_cross_sum += term;
            }
            corollary_n_sum += n.big_n(s);
        }
        let log_term = (std::f64::consts::E / (1.0 - r)).ln();
        let log2_term = log_term * log_term;
        let lhs: Vec<f64> = integrals.iter().map(|col| col[i]).collect();
        let lhs_max = lhs.iter().copied().fold(0.0, f64::max);
        let ratio = lhs_max / (rhs_n_sum + rhs_cross_sum + log2_term);
        let corollary_ratio = (lhs_max / log_term) / (corollary_n_sum + log_term);
        rows.push(ReportRow {
            r,
            s_r: s,
            integrals: lhs,
            rhs_n_sum,
            rhs_cross_sum,
            log2_term,
            ratio,
            corollary_n_sum,
            log_term,
            corollary_ratio,
        });
    }
    if rows.iter().any(|row| {
        let mut all = vec![
            row.rhs_n_sum,
            row.rhs_cross_sum,
            row.log2_term,
            row.ratio,
            row.corollary_n_sum,
        ];
        all.extend(&row.integrals);
        all.iter().any(|v| !v.is_finite())
    }) {
        return Err(Error::Breakdown(
            "report contains non-finite entries".into(),
        ));
    }

    let shrunk: Vec<f64> = radii.iter().map(|&r| grid.s(r)).collect();
    let counting = labelled
        .iter()
        .zip(&counts)
        .map(|((label, _), n)| CountingSummary {
            label: label.clone(),
            origin_order: n.origin_order(),
            zeros: n.zero_count(),
            radius: n.radius(),
            records: n.records(&shrunk),
        })
        .collect();
    let fit_window = default_fit_window(radii);
    let exponents = fit_all(&rows, k, fit_window.0, fit_window.1);
    Ok(OscillationReport {
        k,
        shrink: grid.shrink(),
        rows,
        counting,
        fit_window,
        exponents,
    })
}
