//! Ladder operators and the observable algebra of a single N-dimensional channel.
//!
//! For basis vectors |k⟩, k = 1..N, the raising operator carries √((N−k)k) on
//! the first subdiagonal, the lowering operator is its adjoint, and
//! J3 = (J₊J₋ − J₋J₊)/2 is diagonal with eigenvalues m = k − (N+1)/2. Those
//! eigenvalues relabel the basis as |m⟩, m = −(N−1)/2 .. (N−1)/2, which is the
//! labeling used everywhere downstream.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::matrix::ComplexMatrix;

/// Raising, lowering and diagonal operators for one N-dimensional space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LadderSet {
    pub dim: usize,
    /// Rank j = (N − 1)/2.
    pub rank: HalfInteger,
    pub j_plus: ComplexMatrix,
    pub j_minus: ComplexMatrix,
    pub j3: ComplexMatrix,
}

/// ab − ba.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.commutator(b)
}

/// Build the ladder operators for dimension `dim`.
pub fn build_ladder(dim: usize) -> Result<LadderSet> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let n = dim as f64;
    let mut j_plus = ComplexMatrix::zeros(dim, dim);
    for k in 1..dim {
        // |k+1⟩⟨k| in 1-based indexing.
        let amp = ((n - k as f64) * k as f64).sqrt();
        j_plus.set(k, k - 1, Complex64::new(amp, 0.0));
    }
    let j_minus = j_plus.adjoint();
    let diag: Vec<f64> = (1..=dim).map(|k| k as f64 - (1.0 + n) / 2.0).collect();
    let j3 = ComplexMatrix::from_real_diagonal(&diag);
    Ok(LadderSet { dim, rank: HalfInteger::rank_of_dim(dim), j_plus, j_minus, j3 })
}

impl LadderSet {
    /// (J₊ + J₋)/2, the transverse component at zero phase.
    pub fn jx(&self) -> ComplexMatrix {
        self.j_plus.add(&self.j_minus).scale(0.5)
    }

    /// (e^{iθ}J₊ + e^{−iθ}J₋)/2.
    pub fn transverse(&self, azimuth: f64) -> ComplexMatrix {
        let phase = Complex64::from_polar(1.0, azimuth);
        self.j_plus.scale_complex(phase).add(&self.j_minus.scale_complex(phase.conj())).scale(0.5)
    }

    /// cos(polar)·J3 + sin(polar)·(e^{iθ}J₊ + e^{−iθ}J₋)/2.
    pub fn tilted(&self, polar: f64, azimuth: f64) -> ComplexMatrix {
        self.j3.scale(polar.cos()).add(&self.transverse(azimuth).scale(polar.sin()))
    }
}

/// Observable diagonal in the working basis with the given eigenvalues.
pub fn diagonal_observable(eigs: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(eigs)
}

/// An interpolation polynomial representing a diagonal observable as a
/// function of J3.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LagrangeObservable {
    pub dim: usize,
    /// Interpolation nodes k − (N+1)/2, k = 1..N.
    pub nodes: Vec<f64>,
    /// Interpolated values at the nodes.
    pub values: Vec<f64>,
    /// Monomial coefficients, ascending degree (length = dim).
    pub coeffs: Vec<f64>,
    /// Monomial coefficients of equispaced interpolation degrade quickly;
    /// above dim 12 they are kept but flagged and the matrix is built
    /// directly from the diagonal instead of through them.
    pub stable: bool,
    /// The observable itself, diag(values) in the working basis.
    pub matrix: ComplexMatrix,
}

const LAGRANGE_STABLE_MAX_DIM: usize = 12;

/// Interpolate `values` over the J3 eigenvalues of an N-dimensional space.
pub fn lagrange_observable(values: &[f64], dim: usize) -> Result<LagrangeObservable> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if values.len() != dim {
        return Err(Error::ShapeMismatch {
            expected: format!("{dim} values"),
            got: format!("{}", values.len()),
        });
    }
    let nodes: Vec<f64> = (1..=dim).map(|k| k as f64 - (1.0 + dim as f64) / 2.0).collect();

    // Monomial expansion of the Lagrange form.
    let mut coeffs = vec![0.0; dim];
    for k in 0..dim {
        // Numerator polynomial prod_{k' != k} (x - x_{k'}).
        let mut num = vec![0.0; dim];
        num[0] = 1.0;
        let mut deg = 0;
        let mut denom = 1.0;
        for kp in 0..dim {
            if kp == k {
                continue;
            }
            denom *= nodes[k] - nodes[kp];
            for d in (0..=deg).rev() {
                num[d + 1] += num[d];
                num[d] *= -nodes[kp];
            }
            deg += 1;
        }
        let w = values[k] / denom;
        for d in 0..dim {
            coeffs[d] += w * num[d];
        }
    }

    Ok(LagrangeObservable {
        dim,
        nodes,
        values: values.to_vec(),
        coeffs,
        stable: dim <= LAGRANGE_STABLE_MAX_DIM,
        matrix: diagonal_observable(values),
    })
}

impl LagrangeObservable {
    /// Evaluate the interpolant at a scalar point, in barycentric form.
    pub fn eval(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (k, (&xk, &fk)) in self.nodes.iter().zip(&self.values).enumerate() {
            if x == xk {
                return fk;
            }
            let mut w = 1.0;
            for (kp, &xkp) in self.nodes.iter().enumerate() {
                if kp != k {
                    w *= xk - xkp;
                }
            }
            let t = 1.0 / (w * (x - xk));
            num += t * fk;
            den += t;
        }
        num / den
    }

    /// Evaluate the monomial form on a matrix argument (Horner).
    pub fn eval_matrix(&self, arg: &ComplexMatrix) -> ComplexMatrix {
        let n = arg.rows();
        let mut acc = ComplexMatrix::zeros(n, n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(arg);
            for i in 0..n {
                acc.set(i, i, acc.get(i, i) + Complex64::new(c, 0.0));
            }
        }
        acc
    }
}

/// How the tomography operator family fills out the observable space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisMode {
    /// All axes in one plane: cos φ·J3 + sin φ·(J₊+J₋)/2. Every member is a
    /// real matrix in the working basis, so the family cannot resolve the
    /// imaginary sector of a density matrix.
    Planar,
    /// Planar axes plus azimuthal phases, enough for a full-rank
    /// measurement map (rank N² − 1).
    Phased,
}

/// One measurement axis, (polar, azimuth).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSetting {
    pub polar: f64,
    pub azimuth: f64,
}

/// A family of non-commuting observables used as tomography settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObservableFamily {
    pub dim: usize,
    pub axis_mode: AxisMode,
    pub settings: Vec<AxisSetting>,
    pub members: Vec<ComplexMatrix>,
}

/// Polar angle grid φ_m = mπ/(N+1), m = 0..N.
pub fn uniform_angle_grid(dim: usize) -> Vec<f64> {
    (0..=dim).map(|m| m as f64 * std::f64::consts::PI / (dim as f64 + 1.0)).collect()
}

/// Polar angle grid φ_m = 2πm/N, m = 0..N (the paired-channel prescription;
/// the endpoints coincide, which the least-squares inversion tolerates).
pub fn periodic_angle_grid(dim: usize) -> Vec<f64> {
    (0..=dim).map(|m| 2.0 * std::f64::consts::PI * m as f64 / dim as f64).collect()
}

/// Build a family from explicit axis settings.
pub fn family_from_settings(
    dim: usize,
    axis_mode: AxisMode,
    settings: Vec<AxisSetting>,
) -> Result<ObservableFamily> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let ladder = build_ladder(dim)?;
    let members = settings.iter().map(|s| ladder.tilted(s.polar, s.azimuth)).collect();
    Ok(ObservableFamily { dim, axis_mode, settings, members })
}

/// Phased settings appended to a polar grid: a golden-angle spiral of
/// azimuths plus a quarter-turn copy. The irrational azimuth steps avoid
/// resonances with the polar grid, and the combination gives a
/// rank-(N²−1) measurement map for the dimensions in scope (see the
/// tomography completeness diagnostic).
fn phased_settings(polar: &[f64]) -> Vec<AxisSetting> {
    // 2π/φ² with φ the golden ratio.
    const GOLDEN_ANGLE: f64 = 2.399963229728653;
    let mut settings: Vec<AxisSetting> =
        polar.iter().map(|&p| AxisSetting { polar: p, azimuth: 0.0 }).collect();
    for (m, &p) in polar.iter().enumerate().skip(1) {
        settings.push(AxisSetting { polar: p, azimuth: (m as f64) * GOLDEN_ANGLE });
    }
    for &p in polar.iter().skip(1) {
        settings.push(AxisSetting { polar: p, azimuth: std::f64::consts::FRAC_PI_2 });
    }
    settings
}

/// The standard tomography family on the φ_m = mπ/(N+1) grid.
///
/// `Planar` yields the N+1 members cos φ_m·J3 + sin φ_m·(J₊+J₋)/2; `Phased`
/// extends the grid with azimuthal settings.
pub fn tomo_family(dim: usize, axis_mode: AxisMode) -> Result<ObservableFamily> {
    let polar = uniform_angle_grid(dim);
    let settings = match axis_mode {
        AxisMode::Planar => polar.iter().map(|&p| AxisSetting { polar: p, azimuth: 0.0 }).collect(),
        AxisMode::Phased => phased_settings(&polar),
    };
    family_from_settings(dim, axis_mode, settings)
}

/// The subchannel family on the φ_m = 2πm/N grid.
pub fn tomo_family_periodic(dim: usize, axis_mode: AxisMode) -> Result<ObservableFamily> {
    let polar = periodic_angle_grid(dim);
    let settings = match axis_mode {
        AxisMode::Planar => polar.iter().map(|&p| AxisSetting { polar: p, azimuth: 0.0 }).collect(),
        AxisMode::Phased => phased_settings(&polar),
    };
    family_from_settings(dim, axis_mode, settings)
}

/// Coefficients c_{a,b} of a normally ordered expansion Σ c_{a,b} J₊ᵃ J₋ᵇ.
#[derive(Clone, Debug)]
pub struct NormalOrderDecomposition {
    pub dim: usize,
    /// coeffs[a][b], 0 ≤ a,b ≤ N−1.
    pub coeffs: Vec<Vec<Complex64>>,
    /// Numerical rank of the monomial spanning set (N² when it spans).
    pub rank: usize,
    /// ℓ² residual of the reconstruction; ~0 when the set spans.
    pub residual: f64,
}

impl NormalOrderDecomposition {
    /// Rebuild Σ c_{a,b} J₊ᵃ J₋ᵇ.
    pub fn reconstruct(&self, ladder: &LadderSet) -> ComplexMatrix {
        let n = self.dim;
        let powers_plus = matrix_powers(&ladder.j_plus, n - 1);
        let powers_minus = matrix_powers(&ladder.j_minus, n - 1);
        let mut acc = ComplexMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let term = powers_plus[a].mul(&powers_minus[b]).scale_complex(self.coeffs[a][b]);
                acc = acc.add(&term);
            }
        }
        acc
    }
}

fn matrix_powers(m: &ComplexMatrix, max_power: usize) -> Vec<ComplexMatrix> {
    let mut powers = vec![ComplexMatrix::identity(m.rows())];
    for _ in 1..=max_power {
        powers.push(powers.last().unwrap().mul(m));
    }
    powers
}

/// Solve for the normally ordered coefficients of `obs` over the monomials
/// J₊ᵃ J₋ᵇ, 0 ≤ a,b ≤ N−1, by least squares over the vectorized system.
///
/// When the monomial set is rank-deficient the best fit is returned with a
/// nonzero residual, which is the signal that the spanning claim fails for
/// this dimension.
pub fn normal_order_decompose(
    obs: &ComplexMatrix,
    ladder: &LadderSet,
) -> Result<NormalOrderDecomposition> {
    let n = ladder.dim;
    if obs.rows() != n || obs.cols() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", obs.rows(), obs.cols()),
        });
    }
    let powers_plus = matrix_powers(&ladder.j_plus, n - 1);
    let powers_minus = matrix_powers(&ladder.j_minus, n - 1);

    let mut system = nalgebra::DMatrix::<Complex64>::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let monomial = powers_plus[a].mul(&powers_minus[b]);
            let col = a * n + b;
            for i in 0..n {
                for j in 0..n {
                    system[(i * n + j, col)] = monomial.get(i, j);
                }
            }
        }
    }
    let mut rhs = nalgebra::DVector::<Complex64>::zeros(n * n);
    for i in 0..n {
        for j in 0..n {
            rhs[i * n + j] = obs.get(i, j);
        }
    }

    let svd = system.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * sigma_max).count();
    let solution = svd.solve(&rhs, 1e-10 * sigma_max).map_err(|e| Error::Parse(e.to_string()))?;
    let residual = (&system * &solution - &rhs).norm();

    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for a in 0..n {
        for b in 0..n {
            coeffs[a][b] = solution[a * n + b];
        }
    }
    Ok(NormalOrderDecomposition { dim: n, coeffs, rank, residual })
}
