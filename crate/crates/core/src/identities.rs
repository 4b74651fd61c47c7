//! Standalone scalar identities behind the closed-form dynamics, exposed as
//! checkable functions: the companion-matrix power formula, the weighted
//! binomial sum and its eigenvalue closed form, the Pascal recombination,
//! the binomial/trigonometric sum identities, and the asymptotics of the
//! convolution weights `binom(n-i, i)`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::parallel::parallel_map;

/// Golden ratio.
pub const PHI: f64 = 1.618033988749894848;
/// Maximizer of the weight-growth exponent: `(5 - sqrt(5)) / 10`.
pub fn peak_fraction() -> f64 {
    (5.0 - 5.0f64.sqrt()) / 10.0
}

fn ln_factorial_table() -> &'static Vec<f64> {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; 4096];
        for i in 1..t.len() {
            t[i] = t[i - 1] + (i as f64).ln();
        }
        t
    })
}

/// Natural log of `binom(n, k)`.
pub fn binomial_ln(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let t = ln_factorial_table();
    if n < t.len() {
        t[n] - t[k] - t[n - k]
    } else {
        // Outside the table: direct log-sum. Slow path, rarely taken.
        (1..=k).map(|i| (((n - k + i) as f64) / i as f64).ln()).sum()
    }
}

/// `binom(n, k)` as f64: exact multiplicative recurrence while the value is
/// exactly representable, log-space otherwise.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 60 {
        let mut value = 1.0f64;
        for i in 0..k {
            value = value * (n - i) as f64 / (i + 1) as f64;
        }
        value.round()
    } else {
        binomial_ln(n, k).exp()
    }
}

/// `p_{k+1}(b, c) = sum_{i=0}^{floor(k/2)} binom(k-i, i) b^{k-2i} c^i`,
/// the solution of the two-term recurrence `p_{k+1} = b p_k + c p_{k-1}`.
fn p_sum(b: f64, c: f64, k: usize) -> f64 {
    (0..=k / 2)
        .map(|i| binomial(k - i, i) * b.powi((k - 2 * i) as i32) * c.powi(i as i32))
        .sum()
}

/// `q_k(b, c) = c * p_{k-1}(b, c)` written as its own sum; `q_0 = 1`.
fn q_sum(b: f64, c: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k == 1 {
        return 0.0;
    }
    (0..=(k - 2) / 2)
        .map(|i| binomial(k - i - 2, i) * b.powi((k - 2 * i - 2) as i32) * c.powi((i + 1) as i32))
        .sum()
}

/// Closed form for the k-th power of the companion matrix `[[b, c], [1, 0]]`
/// as four explicit binomial sums; `k >= 2`.
pub fn companion_power_closed(b: f64, c: f64, k: usize) -> Result<Matrix> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k must be >= 2, got {k}")));
    }
    Ok(Matrix::from_row_slice(
        2,
        2,
        &[p_sum(b, c, k), q_sum(b, c, k + 1), p_sum(b, c, k - 1), q_sum(b, c, k)],
    ))
}

/// Weighted binomial sum against its eigenvalue closed form, for
/// `b^2 + 4c > 0`:
///
/// `sum_i binom(k-i, i) b^{k-2i} c^i
///    = ((b + sqrt(D))/2)^{k+1} - ((b - sqrt(D))/2)^{k+1}) / sqrt(D)`.
pub fn binomial_variant(b: f64, c: f64, k: usize) -> Result<(f64, f64)> {
    let discriminant = b * b + 4.0 * c;
    if discriminant <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "b^2 + 4c must be positive, got {discriminant}"
        )));
    }
    let root = discriminant.sqrt();
    let lhs = p_sum(b, c, k);
    let plus = (b + root) / 2.0;
    let minus = (b - root) / 2.0;
    let rhs = (plus.powi(k as i32 + 1) - minus.powi(k as i32 + 1)) / root;
    Ok((lhs, rhs))
}

/// Both sides of the Pascal recombination `b p_k + q_k = p_{k+1}` spelled
/// out as binomial sums, for `k >= 2`.
pub fn pascal_combination(b: f64, c: f64, k: usize) -> Result<(f64, f64)> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k must be >= 2, got {k}")));
    }
    let first: f64 = (0..=(k - 1) / 2)
        .map(|i| binomial(k - i - 1, i) * b.powi((k - 2 * i) as i32) * c.powi(i as i32))
        .sum();
    let lhs = first + q_sum(b, c, k);
    Ok((lhs, p_sum(b, c, k)))
}

/// Both sides of the binomial/trigonometric identities:
///
/// `sum_i binom(n, 2i) (-x^2)^i = (1 + x^2)^{n/2} cos(n arctan x)` and
/// `x sum_i binom(n, 2i+1) (-x^2)^i = (1 + x^2)^{n/2} sin(n arctan x)`.
///
/// Returns `((cos_lhs, cos_rhs), (sin_lhs, sin_rhs))`.
pub fn trig_sum_identities(x: f64, n: usize) -> ((f64, f64), (f64, f64)) {
    let neg_x2 = -x * x;
    let cos_lhs: f64 = (0..=n / 2)
        .map(|i| binomial(n, 2 * i) * neg_x2.powi(i as i32))
        .sum();
    let sin_lhs: f64 = if n == 0 {
        0.0
    } else {
        x * (0..=(n - 1) / 2)
            .map(|i| binomial(n, 2 * i + 1) * neg_x2.powi(i as i32))
            .sum::<f64>()
    };
    let envelope = (1.0 + x * x).powf(n as f64 / 2.0);
    let angle = n as f64 * x.atan();
    ((cos_lhs, envelope * angle.cos()), (sin_lhs, envelope * angle.sin()))
}

/// Peak of the convolution weights `binom(n - i, i)` over `i`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoefficientPeak {
    /// `floor(n (5 - sqrt(5)) / 10)`, where the maximum is attained
    /// (up to an off-by-one from the floor).
    pub i_star: usize,
    /// `binom(n - i_star, i_star)`.
    pub value: f64,
    /// The growth envelope `phi^n / sqrt(n)`.
    pub bound: f64,
}

/// Locates the peak weight and its growth envelope for `n >= 2`.
pub fn coefficient_peak(n: usize) -> Result<CoefficientPeak> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("n must be >= 2, got {n}")));
    }
    let i_star = (n as f64 * peak_fraction()).floor() as usize;
    Ok(CoefficientPeak {
        i_star,
        value: binomial_ln(n - i_star, i_star).exp(),
        bound: (n as f64 * PHI.ln() - 0.5 * (n as f64).ln()).exp(),
    })
}

/// The weight-growth exponent `f(a) = (1-a)^{1-a} / (a^a (1-2a)^{1-2a})`
/// on `(0, 1/2)`; its maximum is `phi`, attained at [`peak_fraction`].
pub fn growth_exponent(a: f64) -> f64 {
    let g = (1.0 - a) * (1.0 - a).ln() - a * a.ln() - (1.0 - 2.0 * a) * (1.0 - 2.0 * a).ln();
    g.exp()
}

/// Result of one randomized identity sweep.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyResult {
    pub name: String,
    pub samples: usize,
    pub max_rel_err: f64,
    pub pass: bool,
}

/// Aggregate of all identity sweeps.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub families: Vec<FamilyResult>,
    pub tolerance: f64,
    pub pass: bool,
}

const SWEEP_TOL: f64 = 1e-8;

fn rel_err(lhs: f64, rhs: f64, scale: f64) -> f64 {
    (lhs - rhs).abs() / 1.0f64.max(lhs.abs()).max(rhs.abs()).max(scale)
}

/// Worst error of `f` over `params`, fanned out in chunks large enough to
/// amortize the scheduling overhead (the per-sample work is sub-microsecond).
fn sweep_max<T: Sync>(params: &[T], f: impl Fn(&T) -> f64 + Sync + Send) -> f64 {
    let chunks: Vec<&[T]> = params.chunks(64).collect();
    parallel_map(&chunks, |chunk| {
        chunk.iter().map(&f).fold(0.0f64, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// Runs every identity family over `samples` random parameter draws each and
/// reports the worst relative error seen. Deterministic for a fixed seed;
/// the samples are evaluated with the data-parallel map.
pub fn run_sweeps(samples: usize, seed: u64) -> SweepReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    // Parameter ranges keep the expressions well conditioned: the identities
    // are exact in reals, but ill-conditioned corners (tiny discriminant,
    // |c| comparable to b^2 at large k) would measure roundoff, not truth.
    let mut variant_params = Vec::with_capacity(samples);
    while variant_params.len() < samples {
        let b = rng.random_range(0.3..1.6) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let c = rng.random_range(-0.2..1.5);
        if b * b + 4.0 * c >= 0.25 {
            variant_params.push((b, c, rng.random_range(0..=40usize)));
        }
    }
    let companion_params: Vec<(f64, f64, usize)> = (0..samples)
        .map(|_| {
            (
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(2..=20usize),
            )
        })
        .collect();
    let mut pascal_params = Vec::with_capacity(samples);
    while pascal_params.len() < samples {
        let b = rng.random_range(0.3..1.6) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let c = rng.random_range(-0.2..1.5);
        if b * b + 4.0 * c >= 0.25 {
            pascal_params.push((b, c, rng.random_range(2..=40usize)));
        }
    }
    let trig_params: Vec<(f64, usize)> = (0..samples)
        .map(|_| (rng.random_range(-3.0..3.0), rng.random_range(0..=30usize)))
        .collect();

    let variant_max = sweep_max(&variant_params, |&(b, c, k)| {
        let (lhs, rhs) = binomial_variant(b, c, k).expect("discriminant enforced");
        rel_err(lhs, rhs, 0.0)
    });
    let companion_max = sweep_max(&companion_params, |&(b, c, k)| {
        let closed = companion_power_closed(b, c, k).expect("k >= 2");
        let direct = crate::linalg::matrix_power(
            &Matrix::from_row_slice(2, 2, &[b, c, 1.0, 0.0]),
            k,
        )
        .expect("finite powers");
        (&closed - &direct).norm() / 1.0f64.max(direct.norm())
    });
    let pascal_max = sweep_max(&pascal_params, |&(b, c, k)| {
        let (lhs, rhs) = pascal_combination(b, c, k).expect("k >= 2");
        rel_err(lhs, rhs, 0.0)
    });
    let trig_max = sweep_max(&trig_params, |&(x, n)| {
        let ((cl, cr), (sl, sr)) = trig_sum_identities(x, n);
        let envelope = (1.0 + x * x).powf(n as f64 / 2.0);
        rel_err(cl, cr, envelope).max(rel_err(sl, sr, envelope))
    });

    // Peak family: exhaustive maximum of binom(n-i, i) against the predicted
    // location, plus the growth-exponent maximizer on a fine grid. Scored as
    // a failure count rather than an error magnitude.
    let peak_ns: Vec<usize> = (2..=260).collect();
    let peak_fail = sweep_max(&peak_ns, |&n| {
        let peak = coefficient_peak(n).expect("n >= 2");
        let (best_i, _) = (0..=n / 2)
            .map(|i| (i, binomial_ln(n - i, i)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty range");
        let location_ok = best_i.abs_diff(peak.i_star) <= 1;
        let ratio = (binomial_ln(n - peak.i_star, peak.i_star)
            - (n as f64 * PHI.ln() - 0.5 * (n as f64).ln()))
        .exp();
        // The peak weight tracks the envelope within a constant window.
        let window_ok = (0.05..=1.0).contains(&ratio);
        if location_ok && window_ok {
            0.0
        } else {
            1.0
        }
    });
    let grid_max = (1..5000)
        .map(|i| i as f64 / 10_000.0)
        .map(|a| (a, growth_exponent(a)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("nonempty grid");
    let peak_extra = ((grid_max.0 - peak_fraction()).abs() / 1e-3).min(1.0).floor()
        + ((grid_max.1 - PHI).abs() / 1e-6).min(1.0).floor();

    let fold = |name: &str, samples: usize, max: f64| FamilyResult {
        name: name.to_string(),
        samples,
        max_rel_err: max,
        pass: max <= SWEEP_TOL,
    };
    let mut families = vec![
        fold("binomial-variant", variant_params.len(), variant_max),
        fold("companion-power", companion_params.len(), companion_max),
        fold("pascal-combination", pascal_params.len(), pascal_max),
        fold("trig-sums", trig_params.len(), trig_max),
    ];
    let peak_fail = peak_fail.max(peak_extra.min(1.0));
    families.push(FamilyResult {
        name: "coefficient-peak".to_string(),
        samples: peak_ns.len(),
        max_rel_err: peak_fail,
        pass: peak_fail == 0.0,
    });

    let pass = families.iter().all(|f| f.pass);
    SweepReport { families, tolerance: SWEEP_TOL, pass }
}
