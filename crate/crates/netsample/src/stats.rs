//! Ordinary least squares for the eight regression models relating sampling
//! error to homophily strength and group size difference.
//!
//! The design is fixed at six columns: intercept, attribute influence
//! `2 * |h - 0.5|`, group size difference `1 - 2f`, their interaction,
//! sample size, and top k. The solver factors the design matrix with
//! Householder reflections rather than forming normal equations; an
//! independent normal-equations solver exists only in the test suite as an
//! oracle.

use thiserror::Error;

use crate::metrics::MetricRecord;
use crate::samplers::SampleMethod;

/// Number of design columns.
pub const COLUMNS: usize = 6;

/// Design column names, in column order.
pub const COLUMN_NAMES: [&str; COLUMNS] = [
    "intercept",
    "attr_infl",
    "grp_size_diff",
    "attr_infl:grp_size_diff",
    "sample_size",
    "top_k",
];

/// Which error measure a model explains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseKind {
    /// Top-k minority bias.
    BiasTopk,
    /// `|log nCGR(minority)| + |log nCGR(majority)|`.
    AbsLogNcgrSum,
}

impl ResponseKind {
    pub fn name(self) -> &'static str {
        match self {
            ResponseKind::BiasTopk => "bias_topk",
            ResponseKind::AbsLogNcgrSum => "ncgr_topk",
        }
    }
}

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("records mix sampling methods ({0} and {1}); fit one model per method")]
    MixedMethods(SampleMethod, SampleMethod),
    #[error("{rows} rows are too few for {COLUMNS} columns; need at least {needed}")]
    TooFewRows { rows: usize, needed: usize },
    #[error("non-finite value in column {column} of row {row}")]
    NonFinite { row: usize, column: &'static str },
    #[error("design matrix is rank deficient: column '{column}' is collinear with earlier columns")]
    Singular { column: &'static str },
}

/// Row-major design matrix plus response vector for one model.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    rows: Vec<[f64; COLUMNS]>,
    response: Vec<f64>,
}

impl DesignMatrix {
    /// Assemble a matrix from raw rows. Rows must outnumber columns so the
    /// residual variance is defined, and every entry must be finite.
    pub fn from_rows(rows: Vec<[f64; COLUMNS]>, response: Vec<f64>) -> Result<Self, StatsError> {
        assert_eq!(rows.len(), response.len(), "row/response length mismatch");
        if rows.len() <= COLUMNS {
            return Err(StatsError::TooFewRows { rows: rows.len(), needed: COLUMNS + 1 });
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(StatsError::NonFinite { row: i, column: COLUMN_NAMES[j] });
                }
            }
            if !response[i].is_finite() {
                return Err(StatsError::NonFinite { row: i, column: "response" });
            }
        }
        Ok(Self { rows, response })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[[f64; COLUMNS]] {
        &self.rows
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }
}

/// Encode homophily as distance from the neutral point, scaled to `[0, 1]`.
pub fn attribute_influence(h: f64) -> f64 {
    2.0 * (h - 0.5).abs()
}

/// Encode group imbalance: 0 for equal groups, toward 1 as the minority
/// vanishes.
pub fn group_size_difference(f: f64) -> f64 {
    1.0 - 2.0 * f
}

/// Build the per-method design matrix from campaign records.
pub fn build_design_matrix(
    records: &[MetricRecord],
    response: ResponseKind,
) -> Result<DesignMatrix, StatsError> {
    if let Some(first) = records.first() {
        if let Some(bad) = records.iter().find(|r| r.method != first.method) {
            return Err(StatsError::MixedMethods(first.method, bad.method));
        }
    }
    let rows: Vec<[f64; COLUMNS]> = records
        .iter()
        .map(|r| {
            let attr = attribute_influence(r.h);
            let gsd = group_size_difference(r.f);
            [1.0, attr, gsd, attr * gsd, r.sample_fraction, r.k as f64]
        })
        .collect();
    let y: Vec<f64> = records
        .iter()
        .map(|r| match response {
            ResponseKind::BiasTopk => r.bias_topk,
            ResponseKind::AbsLogNcgrSum => r.log_ncgr_minority.abs() + r.log_ncgr_majority.abs(),
        })
        .collect();
    DesignMatrix::from_rows(rows, y)
}

/// Fitted model: coefficient, standard error, and t statistic per column,
/// plus the usual fit summary.
#[derive(Debug, Clone)]
pub struct RegressionResult {
    pub coefficients: [f64; COLUMNS],
    pub standard_errors: [f64; COLUMNS],
    pub t_stats: [f64; COLUMNS],
    pub r_squared: f64,
    pub n_obs: usize,
}

/// Large-sample significance stars: `|t| >= 2.58` maps to p < 0.01 and
/// `|t| >= 3.29` to p < 0.001 under the normal approximation.
pub fn significance_stars(t: f64) -> &'static str {
    if t.abs() >= 3.29 {
        "***"
    } else if t.abs() >= 2.58 {
        "**"
    } else {
        ""
    }
}

/// Least-squares fit via Householder QR.
pub fn ols_fit(design: &DesignMatrix) -> Result<RegressionResult, StatsError> {
    let n = design.n_rows();
    let p = COLUMNS;
    let mut a: Vec<f64> = Vec::with_capacity(n * p);
    for row in &design.rows {
        a.extend_from_slice(row);
    }
    let mut qty = design.response.clone();

    // Column norms before factorization anchor the rank tolerance.
    let mut col_scale = [0.0f64; COLUMNS];
    for (j, scale) in col_scale.iter_mut().enumerate() {
        *scale = (0..n).map(|i| a[i * p + j] * a[i * p + j]).sum::<f64>().sqrt();
    }

    let mut r = [[0.0f64; COLUMNS]; COLUMNS];
    for j in 0..p {
        let norm2: f64 = (j..n).map(|i| a[i * p + j] * a[i * p + j]).sum();
        let norm = norm2.sqrt();
        if norm <= 1e-10 * col_scale[j].max(1.0) {
            return Err(StatsError::Singular { column: COLUMN_NAMES[j] });
        }
        let alpha = if a[j * p + j] > 0.0 { -norm } else { norm };
        let v0 = a[j * p + j] - alpha;
        // ||v||^2 = 2 * alpha * (alpha - x0)
        let vnorm2 = 2.0 * alpha * (alpha - a[j * p + j]);
        a[j * p + j] = v0;

        for col in (j + 1)..p {
            let dot: f64 = (j..n).map(|i| a[i * p + j] * a[i * p + col]).sum();
            let factor = 2.0 * dot / vnorm2;
            for i in j..n {
                a[i * p + col] -= factor * a[i * p + j];
            }
        }
        let dot: f64 = (j..n).map(|i| a[i * p + j] * qty[i]).sum();
        let factor = 2.0 * dot / vnorm2;
        for i in j..n {
            qty[i] -= factor * a[i * p + j];
        }

        r[j][j] = alpha;
        for col in (j + 1)..p {
            r[j][col] = a[j * p + col];
        }
    }

    // Verify the triangle is safely invertible before back-substitution.
    for j in 0..p {
        if r[j][j].abs() <= 1e-10 * col_scale[j].max(1.0) {
            return Err(StatsError::Singular { column: COLUMN_NAMES[j] });
        }
    }

    let mut beta = [0.0f64; COLUMNS];
    for j in (0..p).rev() {
        let mut s = qty[j];
        for col in (j + 1)..p {
            s -= r[j][col] * beta[col];
        }
        beta[j] = s / r[j][j];
    }

    let ssr: f64 = qty[p..].iter().map(|v| v * v).sum();
    let mean_y: f64 = design.response.iter().sum::<f64>() / n as f64;
    let sst: f64 = design.response.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let r_squared = if sst <= f64::EPSILON * n as f64 * mean_y.abs().max(1.0) {
        0.0
    } else {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    };

    // (X^T X)^-1 = R^-1 R^-T; its diagonal is the squared row norms of R^-1.
    let mut rinv = [[0.0f64; COLUMNS]; COLUMNS];
    for k in 0..p {
        rinv[k][k] = 1.0 / r[k][k];
        for j in (0..k).rev() {
            let mut s = 0.0;
            for i in (j + 1)..=k {
                s += r[j][i] * rinv[i][k];
            }
            rinv[j][k] = -s / r[j][j];
        }
    }
    let sigma2 = ssr / (n - p) as f64;
    let mut standard_errors = [0.0f64; COLUMNS];
    let mut t_stats = [0.0f64; COLUMNS];
    for j in 0..p {
        let diag: f64 = (j..p).map(|k| rinv[j][k] * rinv[j][k]).sum();
        standard_errors[j] = (sigma2 * diag).sqrt();
        t_stats[j] = if standard_errors[j] > 0.0 {
            beta[j] / standard_errors[j]
        } else if beta[j] == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(beta[j])
        };
    }

    Ok(RegressionResult {
        coefficients: beta,
        standard_errors,
        t_stats,
        r_squared,
        n_obs: n,
    })
}
