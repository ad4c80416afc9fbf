//! Multi-band splicing: stacks per-band CFR measurements into one
//! measurement vector, builds the delay-grid dictionary of complex
//! exponentials, and recovers the sparse CIR with orthogonal matching
//! pursuit.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::SpliceError;
use crate::linalg::lstsq;
use crate::numeric::{cis, norm2, Real};
use crate::ofdm_link::{subcarrier_freqs, BandPlan, CfrMeasurement};

/// Condition number above which the OMP least-squares refit stops early.
pub const OMP_COND_LIMIT: f64 = 1e12;

/// Band-major concatenation of CFR measurements: frequencies and samples
/// over all present bands, lowest band first.
#[derive(Clone, Debug)]
pub struct StackedMeasurement<F> {
    pub freqs_hz: Vec<F>,
    pub samples: Vec<Complex<F>>,
    /// (band index, start..end range into the stacked vectors)
    pub band_ranges: Vec<(usize, std::ops::Range<usize>)>,
}

/// Delay-grid dictionary: `len(freqs) x G` matrix whose column i is the
/// unit-norm exponential for grid delay `i / (G f_s)`.
#[derive(Clone, Debug)]
pub struct Dictionary<F: Real> {
    atoms: Array2<Complex<F>>,
    grid_delays_s: Vec<F>,
    spacing_hz: F,
}

impl<F: Real> Dictionary<F> {
    pub fn num_atoms(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn num_rows(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn grid_delays_s(&self) -> &[F] {
        &self.grid_delays_s
    }

    pub fn spacing_hz(&self) -> F {
        self.spacing_hz
    }

    pub fn atoms(&self) -> &Array2<Complex<F>> {
        &self.atoms
    }

    /// Grid step `1 / (G f_s)`.
    pub fn grid_step_s(&self) -> F {
        F::one() / (F::of(self.num_atoms() as f64) * self.spacing_hz)
    }
}

/// How an OMP run terminated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OmpTermination {
    ReachedSparsity,
    ResidualTolerance,
    /// Refit became ill-conditioned; the result holds the last well-behaved
    /// iterate.
    IllConditioned { cond: f64 },
}

/// Recovered sparse CIR: selected grid indices (in selection order), their
/// least-squares coefficients, and the residual norm history (entry 0 is the
/// input norm).
#[derive(Clone, Debug)]
pub struct SpliceResult<F: Real> {
    pub support: Vec<usize>,
    pub coefficients: Vec<Complex<F>>,
    pub residual_norms: Vec<F>,
    pub termination: OmpTermination,
}

/// Stacks measurements in band order. Bands may be a subset of the plan;
/// frequencies are recomputed from the plan and must match the measurement.
pub fn stack_measurements<F: Real>(
    measurements: &[CfrMeasurement<F>],
    plan: &BandPlan<F>,
) -> Result<StackedMeasurement<F>, SpliceError> {
    if measurements.is_empty() {
        return Err(SpliceError::EmptyInput);
    }
    let mut order: Vec<usize> = (0..measurements.len()).collect();
    order.sort_by_key(|&i| measurements[i].band);
    for w in order.windows(2) {
        if measurements[w[0]].band == measurements[w[1]].band {
            return Err(SpliceError::DuplicateBand(measurements[w[0]].band));
        }
    }

    let n = plan.num_subcarriers();
    let mut freqs = Vec::with_capacity(order.len() * n);
    let mut samples = Vec::with_capacity(order.len() * n);
    let mut band_ranges = Vec::with_capacity(order.len());
    for &i in &order {
        let meas = &measurements[i];
        let expected = subcarrier_freqs(plan, meas.band)?;
        if meas.samples.len() != n {
            return Err(SpliceError::PlanMismatch(format!(
                "band {} has {} samples, plan expects {}",
                meas.band,
                meas.samples.len(),
                n
            )));
        }
        let tol = plan.spacing_hz() * F::of(1e-6);
        for (a, b) in meas.freqs_hz.iter().zip(&expected) {
            if (*a - *b).abs() > tol {
                return Err(SpliceError::PlanMismatch(format!(
                    "band {} frequency {} does not match plan value {}",
                    meas.band, a, b
                )));
            }
        }
        let start = freqs.len();
        freqs.extend_from_slice(&expected);
        samples.extend_from_slice(&meas.samples);
        band_ranges.push((meas.band, start..freqs.len()));
    }
    Ok(StackedMeasurement {
        freqs_hz: freqs,
        samples,
        band_ranges,
    })
}

/// Builds the dictionary over the stacked frequency vector. `G =
/// grid_factor * len(freqs)`; columns are normalized by `1/sqrt(len)` so
/// each has unit norm.
pub fn build_dictionary<F: Real>(
    freqs_hz: &[F],
    spacing_hz: F,
    grid_factor: usize,
) -> Result<Dictionary<F>, SpliceError> {
    if freqs_hz.is_empty() {
        return Err(SpliceError::EmptyInput);
    }
    if grid_factor < 2 {
        return Err(SpliceError::GridTooCoarse(grid_factor));
    }
    let rows = freqs_hz.len();
    let g = grid_factor * rows;
    let gf = F::of(g as f64);
    let scale = F::one() / F::of(rows as f64).sqrt();
    let two_pi = F::TAU();

    let grid_delays_s: Vec<F> = (0..g)
        .map(|i| F::of(i as f64) / (gf * spacing_hz))
        .collect();
    let mut atoms = Array2::from_elem((rows, g), Complex::new(F::zero(), F::zero()));
    for (i, &tau) in grid_delays_s.iter().enumerate() {
        for (l, &f) in freqs_hz.iter().enumerate() {
            atoms[[l, i]] = cis(-two_pi * f * tau) * Complex::new(scale, F::zero());
        }
    }
    Ok(Dictionary {
        atoms,
        grid_delays_s,
        spacing_hz,
    })
}

/// Orthogonal matching pursuit: greedily selects the atom most correlated
/// with the residual (ties break to the lowest index), refits all selected
/// coefficients by least squares, and stops at sparsity `k` or when the
/// residual drops to `tol * ||y||`. Pass `tol = 0` to stop on sparsity only.
pub fn omp<F: Real>(
    stacked: &StackedMeasurement<F>,
    dict: &Dictionary<F>,
    k: usize,
    tol: F,
) -> Result<SpliceResult<F>, SpliceError> {
    let g = dict.num_atoms();
    if k == 0 || k > g {
        return Err(SpliceError::BadSparsity { got: k, max: g });
    }
    if stacked.samples.len() != dict.num_rows() {
        return Err(SpliceError::LengthMismatch {
            expected: dict.num_rows(),
            actual: stacked.samples.len(),
        });
    }

    let y = Array1::from_vec(stacked.samples.clone());
    let y_norm = norm2(&stacked.samples);
    let mut residual = y.clone();
    let mut support: Vec<usize> = Vec::with_capacity(k);
    let mut selected = vec![false; g];
    let mut coefficients: Vec<Complex<F>> = Vec::new();
    let mut residual_norms = vec![y_norm];
    let mut termination = OmpTermination::ReachedSparsity;

    let threshold = tol * y_norm;
    let rows = dict.num_rows();

    while support.len() < k {
        if residual_norms.last().copied().unwrap() <= threshold && tol > F::zero() {
            termination = OmpTermination::ResidualTolerance;
            break;
        }

        // correlation |<d_i, r>| over unselected atoms, lowest index wins ties
        let mut best_idx = usize::MAX;
        let mut best_val = F::neg_infinity();
        for i in 0..g {
            if selected[i] {
                continue;
            }
            let col = dict.atoms.column(i);
            let mut dot = Complex::new(F::zero(), F::zero());
            for l in 0..rows {
                dot += col[l].conj() * residual[l];
            }
            let v = dot.norm_sqr();
            if v > best_val {
                best_val = v;
                best_idx = i;
            }
        }
        support.push(best_idx);
        selected[best_idx] = true;

        // refit all selected coefficients
        let mut a = Array2::from_elem(
            (rows, support.len()),
            Complex::new(F::zero(), F::zero()),
        );
        for (j, &idx) in support.iter().enumerate() {
            a.column_mut(j).assign(&dict.atoms.column(idx));
        }
        let sol = match lstsq(&a, &y) {
            Ok(sol) if sol.cond_estimate.as_f64() <= OMP_COND_LIMIT => sol,
            Ok(sol) => {
                support.pop();
                termination = OmpTermination::IllConditioned {
                    cond: sol.cond_estimate.as_f64(),
                };
                break;
            }
            Err(SpliceError::RankDeficient { .. }) => {
                support.pop();
                termination = OmpTermination::IllConditioned { cond: f64::INFINITY };
                break;
            }
            Err(e) => return Err(e),
        };
        residual = &y - &a.dot(&sol.solution);
        coefficients = sol.solution.to_vec();
        residual_norms.push(norm2(residual.as_slice().expect("contiguous")));
    }

    Ok(SpliceResult {
        support,
        coefficients,
        residual_norms,
        termination,
    })
}

/// Delays of the recovered support, paired with coefficients and sorted by
/// delay ascending.
pub fn support_to_delays<F: Real>(
    result: &SpliceResult<F>,
    dict: &Dictionary<F>,
) -> Vec<(F, Complex<F>)> {
    let mut out: Vec<(F, Complex<F>)> = result
        .support
        .iter()
        .zip(&result.coefficients)
        .map(|(&idx, &c)| (dict.grid_delays_s()[idx], c))
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite delays"));
    out
}
