//! Majorana zero modes of quadratic chains.
//!
//! A parity-conserving quadratic Hamiltonian is written in the interleaved
//! Majorana basis `γ = (a_1, b_1, …, a_L, b_L)` as
//! `H = h_0·1 + (i/4) Σ_{jk} A_{jk} γ_j γ_k` with `A` real antisymmetric.
//! Kernel vectors `v` of `A` give Hermitian operators `Σ_k v_k γ_k` that
//! commute with `H`.

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{hprime, Boundary, FFModelSpec};
use crate::hilbert::{anticommutator_norm, commutator_norm, parity_operator, OperatorMatrix, PauliString, PauliSum, ONE};
use crate::jordan_wigner::{FermionOpSet, KitaevParams};

/// Singular values of `A` at or below this count as zero modes.
pub const NULL_TOL: f64 = 1e-9;
/// Allowed higher-order content (coefficient 2-norm) of a quadratic operator.
pub const QUADRATIC_TOL: f64 = 1e-10;
/// Weights are clamped here before taking logarithms in the decay fit.
pub const WEIGHT_FLOOR: f64 = 1e-32;

#[derive(Debug, Clone)]
pub struct MajoranaQuadraticForm {
    pub sites: usize,
    /// Real antisymmetric `2L × 2L` matrix.
    pub a_matrix: Mat<f64>,
    /// Coefficient of the identity.
    pub offset: f64,
    /// Coefficient 2-norm of everything that is not constant or quadratic.
    pub higher_order_residual: f64,
}

impl MajoranaQuadraticForm {
    pub fn dim(&self) -> usize {
        2 * self.sites
    }

    /// `h_0·1 + (i/2) Σ_{j<k} A_{jk} γ_jγ_k`.
    pub fn to_pauli_sum(&self, ops: &FermionOpSet) -> Result<PauliSum> {
        let n = self.dim();
        let mut terms = vec![PauliString::identity(self.sites)?.scaled(C64::new(self.offset, 0.0))];
        for j in 0..n {
            for k in j + 1..n {
                let a = self.a_matrix[(j, k)];
                if a != 0.0 {
                    let p = ops.majorana(j)?.product(ops.majorana(k)?)?;
                    terms.push(p.scaled(C64::new(0.0, 0.5 * a)));
                }
            }
        }
        PauliSum::from_terms(self.sites, terms)
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim();
        let mut r = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                r = r.max((self.a_matrix[(j, k)] + self.a_matrix[(k, j)]).abs());
            }
        }
        r
    }

    /// Singular values of `A`, descending.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        self.a_matrix.singular_values().map_err(linalg)
    }
}

fn linalg(e: impl std::fmt::Debug) -> Error {
    Error::LinearAlgebra(format!("{e:?}"))
}

/// Projects `h` on the constant and Majorana-bilinear operators.
///
/// Fails with [`Error::NonQuadratic`] when the remainder exceeds
/// [`QUADRATIC_TOL`].
pub fn extract_quadratic_form(h: &OperatorMatrix, ops: &FermionOpSet) -> Result<MajoranaQuadraticForm> {
    let form = project_quadratic(h, ops)?;
    if form.higher_order_residual > QUADRATIC_TOL {
        return Err(Error::NonQuadratic {
            residual: form.higher_order_residual,
        });
    }
    Ok(form)
}

/// As [`extract_quadratic_form`] without the quadratic check.
pub fn project_quadratic(h: &OperatorMatrix, ops: &FermionOpSet) -> Result<MajoranaQuadraticForm> {
    let sites = ops.sites();
    if h.sites() != sites {
        return Err(Error::DimensionMismatch(format!(
            "operator on {} sites, fermions on {sites}",
            h.sites()
        )));
    }
    let scale = (h.dim() as f64).recip();
    let offset = PauliString::identity(sites)?.trace_against(h)?.re * scale;
    let n = 2 * sites;
    let mut a = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        for k in j + 1..n {
            let p = ops.majorana(j)?.product(ops.majorana(k)?)?;
            // coefficient x of γ_jγ_k is (i/2)A_jk
            let x = p.trace_against(h)? * scale;
            let ajk = (x * C64::new(0.0, -2.0)).re;
            a[(j, k)] = ajk;
            a[(k, j)] = -ajk;
        }
    }
    let mut form = MajoranaQuadraticForm {
        sites,
        a_matrix: a,
        offset,
        higher_order_residual: 0.0,
    };
    let rest = h.try_sub(&form.to_pauli_sum(ops)?.to_matrix()?)?;
    form.higher_order_residual = rest.frobenius_norm() * scale.sqrt();
    Ok(form)
}

/// Orthonormal basis of `ker A`: right singular vectors with singular value
/// at most `tol`.
pub fn null_modes(form: &MajoranaQuadraticForm, tol: f64) -> Result<Vec<Vec<f64>>> {
    let n = form.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let svd = form.a_matrix.svd().map_err(linalg)?;
    let s = svd.S().column_vector();
    let v = svd.V();
    Ok((0..n)
        .filter(|&k| s[k] <= tol)
        .map(|k| (0..n).map(|r| v[(r, k)]).collect())
        .collect())
}

/// `Σ_k v_k γ_k` for real coefficients in the interleaved order.
pub fn majorana_operator(coeffs: &[f64], ops: &FermionOpSet) -> Result<OperatorMatrix> {
    if coeffs.len() != 2 * ops.sites() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} Majoranas",
            coeffs.len(),
            2 * ops.sites()
        )));
    }
    let terms = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(k, &c)| Ok(ops.majorana(k)?.scaled(C64::new(c, 0.0))))
        .collect::<Result<Vec<_>>>()?;
    PauliSum::from_terms(ops.sites(), terms)?.to_matrix()
}

/// `c̃ = N Σ_j f^j c_j` with `N = (Σ_j f^{2j})^{−1/2}`.
pub fn case_iii_mode_sum(f: f64, ops: &FermionOpSet) -> Result<PauliSum> {
    if !f.is_finite() || f == 0.0 {
        return Err(Error::param("f", "f must be nonzero"));
    }
    let l = ops.sites();
    let norm = (1..=l).map(|j| f.powi(2 * j as i32)).sum::<f64>().sqrt();
    let mut sum = PauliSum::zero(l);
    for j in 1..=l {
        sum = sum.plus(&ops.c(j)?.scaled(C64::new(f.powi(j as i32) / norm, 0.0)));
    }
    Ok(sum)
}

pub fn case_iii_mode(f: f64, ops: &FermionOpSet) -> Result<OperatorMatrix> {
    case_iii_mode_sum(f, ops)?.to_matrix()
}

/// The Majorana pair `c̃ + c̃†` and `−i(c̃ − c̃†)` of the case (iii) mode.
pub fn case_iii_majoranas(f: f64, ops: &FermionOpSet) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let c = case_iii_mode_sum(f, ops)?;
    let cd = c.adjoint();
    let g1 = c.plus(&cd);
    let g2 = c.plus(&cd.scaled(-ONE)).scaled(C64::new(0.0, -1.0));
    Ok((g1.to_matrix()?, g2.to_matrix()?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Left,
    Right,
    Delocalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSource {
    /// `|v_{a_j}|² + |v_{b_j}|²` of a Majorana-linear operator.
    MajoranaLinear,
    /// Frobenius weight of the part acting nontrivially on each site.
    PauliMarginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Slope of `ln w` against distance from the heavier edge.
    pub rate: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeReport {
    pub hermiticity_residual: f64,
    pub parity_anticomm_residual: f64,
    pub commutator_residual: f64,
    pub normalization_residual: f64,
    pub localization_profile: Vec<f64>,
    pub profile_source: ProfileSource,
    /// Profile centre of mass mapped to `[0, 1]` (site 1 → 0, site L → 1).
    pub center: f64,
    pub edge: Edge,
    pub decay_fit: DecayFit,
    /// Classification rule, recorded with every report.
    pub edge_rule: String,
}

impl ModeReport {
    pub fn max_residual(&self) -> f64 {
        self.hermiticity_residual
            .max(self.parity_anticomm_residual)
            .max(self.commutator_residual)
            .max(self.normalization_residual)
    }
}

const EDGE_RULE: &str = "left if centre < 1/3, right if centre > 2/3, else delocalized";

/// Coefficients `v_k = Tr(γ_k γ)/2^L` and whether `γ` is linear in the Majoranas.
fn majorana_expansion(gamma: &OperatorMatrix, ops: &FermionOpSet) -> Result<(Vec<C64>, bool)> {
    let scale = (gamma.dim() as f64).recip();
    let coeffs = (0..2 * ops.sites())
        .map(|k| Ok(ops.majorana(k)?.trace_against(gamma)? * scale))
        .collect::<Result<Vec<_>>>()?;
    let linear = PauliSum::from_terms(
        ops.sites(),
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| Ok(ops.majorana(k)?.scaled(c)))
            .collect::<Result<Vec<_>>>()?,
    )?
    .to_matrix()?;
    let rest = gamma.try_sub(&linear)?.frobenius_norm();
    Ok((coeffs, rest <= 1e-9 * gamma.frobenius_norm().max(1e-300)))
}

/// `‖M − ½ Tr_j(M) ⊗ 1_j‖_F²`, the weight of Pauli strings acting on site `j`.
fn pauli_marginals(m: &OperatorMatrix) -> Vec<f64> {
    let l = m.sites();
    let dim = m.dim();
    (1..=l)
        .map(|j| {
            let bit = crate::hilbert::site_bit(j, l);
            let mut w = 0.0;
            for c in 0..dim {
                for r in 0..dim {
                    let v = m.get(r, c);
                    if (r ^ c) & bit != 0 {
                        w += v.norm_sqr();
                    } else {
                        let avg = 0.5 * (m.get(r & !bit, c & !bit) + m.get(r | bit, c | bit));
                        w += (v - avg).norm_sqr();
                    }
                }
            }
            w
        })
        .collect()
}

fn normalize_profile(w: &mut [f64]) {
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|x| *x /= total);
    }
}

/// Centre of mass of a profile on `[0, 1]`.
pub fn profile_center(profile: &[f64]) -> f64 {
    let l = profile.len();
    if l <= 1 {
        return 0.5;
    }
    profile
        .iter()
        .enumerate()
        .map(|(j, w)| w * j as f64)
        .sum::<f64>()
        / (l - 1) as f64
}

pub fn classify_edge(profile: &[f64]) -> Edge {
    let x = profile_center(profile);
    if x < 1.0 / 3.0 {
        Edge::Left
    } else if x > 2.0 / 3.0 {
        Edge::Right
    } else {
        Edge::Delocalized
    }
}

/// Least-squares fit of `ln max(w_j, WEIGHT_FLOOR)` against the distance
/// from whichever end carries more weight.
pub fn decay_fit(profile: &[f64]) -> DecayFit {
    let l = profile.len();
    if l < 2 {
        return DecayFit { rate: 0.0, r2: 1.0 };
    }
    let from_left = profile[0] >= profile[l - 1];
    let pts: Vec<(f64, f64)> = (0..l)
        .map(|j| {
            let d = if from_left { j } else { l - 1 - j };
            (d as f64, profile[j].max(WEIGHT_FLOOR).ln())
        })
        .collect();
    let n = l as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let rate = sxy / sxx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - my - rate * (p.0 - mx)).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    DecayFit { rate, r2 }
}

/// Residuals of the zero-mode conditions — `γ† = γ`, `{(−1)^F, γ} = 0`,
/// `[γ, H] = 0`, `γ² = 1` — in spectral norm, plus an edge profile.
pub fn mzm_condition_report(gamma: &OperatorMatrix, h: &OperatorMatrix, ops: &FermionOpSet) -> Result<ModeReport> {
    let l = ops.sites();
    if gamma.sites() != l || h.sites() != l {
        return Err(Error::DimensionMismatch(format!(
            "mode on {} sites, Hamiltonian on {}, fermions on {l}",
            gamma.sites(),
            h.sites()
        )));
    }
    let parity = parity_operator(l)?;
    let square = gamma * gamma;
    let (coeffs, linear) = majorana_expansion(gamma, ops)?;
    let (mut profile, source) = if linear {
        let w = (0..l)
            .map(|j| coeffs[2 * j].norm_sqr() + coeffs[2 * j + 1].norm_sqr())
            .collect();
        (w, ProfileSource::MajoranaLinear)
    } else {
        (pauli_marginals(gamma), ProfileSource::PauliMarginal)
    };
    normalize_profile(&mut profile);
    Ok(ModeReport {
        hermiticity_residual: (gamma - &gamma.adjoint()).spectral_norm(),
        parity_anticomm_residual: anticommutator_norm(&parity, gamma)?,
        commutator_residual: commutator_norm(gamma, h)?,
        normalization_residual: (&square - &OperatorMatrix::identity(l)?).spectral_norm(),
        center: profile_center(&profile),
        edge: classify_edge(&profile),
        decay_fit: decay_fit(&profile),
        localization_profile: profile,
        profile_source: source,
        edge_rule: EDGE_RULE.into(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MzmScan {
    pub n_zero_modes: usize,
    pub reports: Vec<ModeReport>,
    pub spatially_separated: bool,
    /// Smallest singular values of `A` (ascending, at most four).
    pub lowest_singular_values: Vec<f64>,
    pub null_tol: f64,
}

/// Extracts the quadratic form of the open chain's `H′`, finds its null
/// modes and reports on each. Interacting chains are rejected.
pub fn mzm_scan(spec: &FFModelSpec, null_tol: f64) -> Result<MzmScan> {
    if spec.boundary != Boundary::Open {
        return Err(Error::Unsupported("zero-mode scans are defined for open chains".into()));
    }
    let (h, _) = hprime(spec)?;
    let ops = FermionOpSet::new(spec.sites)?;
    let form = extract_quadratic_form(&h, &ops)?;
    let modes = null_modes(&form, null_tol)?;
    let reports = modes
        .iter()
        .map(|v| mzm_condition_report(&majorana_operator(v, &ops)?, &h, &ops))
        .collect::<Result<Vec<_>>>()?;
    let spatially_separated = reports.iter().any(|r| r.edge == Edge::Left) && reports.iter().any(|r| r.edge == Edge::Right);
    let mut sv = form.singular_values()?;
    sv.reverse();
    sv.truncate(4);
    Ok(MzmScan {
        n_zero_modes: modes.len(),
        reports,
        spatially_separated,
        lowest_singular_values: sv,
        null_tol,
    })
}

/// Kitaev's condition for the topological phase of the non-interacting
/// chain: `2|t| > |μ|` and `Δ ≠ 0`, with the bulk chemical potential.
pub fn kitaev_topological(p: &KitaevParams) -> bool {
    2.0 * p.t.abs() > p.mu_bulk.abs() && p.delta != 0.0
}

/// Couplings of the case (iii) chain: hopping `4Bf/(1+f²)`, no pairing,
/// bulk chemical potential `4A` (edges `2A(1 ∓ …)` are not needed here).
pub fn case_iii_kitaev_params(a: f64, b: f64, f: f64, sites: usize) -> KitaevParams {
    let t = 4.0 * b * f / (1.0 + f * f);
    KitaevParams {
        t,
        delta: 0.0,
        u_int: b - a,
        mu_bulk: 4.0 * a,
        mu_edge: 2.0 * a,
        sites,
    }
}

/// `W` in `H = ½ Q†WQ + const`, `Q = (c_1, …, c_L)ᵀ`, for a quadratic
/// number-conserving `H`: `W_{jk} = 2 Tr(c_j [H, c_k†]) / 2^{L−1}`.
pub fn complex_mode_matrix(h: &OperatorMatrix, ops: &FermionOpSet) -> Result<Mat<C64>> {
    let l = ops.sites();
    let c: Vec<OperatorMatrix> = (1..=l).map(|j| ops.c_matrix(j)).collect::<Result<_>>()?;
    let cd: Vec<OperatorMatrix> = c.iter().map(OperatorMatrix::adjoint).collect();
    let half = (h.dim() / 2) as f64;
    let mut w = Mat::<C64>::zeros(l, l);
    for k in 0..l {
        let comm = &(h * &cd[k]) - &(&cd[k] * h);
        for j in 0..l {
            w[(j, k)] = 2.0 * (&c[j] * &comm).trace() / half;
        }
    }
    Ok(w)
}
