//! Exact diagonalization: spectra, ground spaces, frustration-freeness,
//! gap scans, parity sectors and the projector-replacement bounds.
//!
//! Everything is dense. Thresholds are absolute and assume the
//! zero-normalized form of a frustration-free chain, whose ground energy is
//! exactly 0.

use faer::{Mat, MatRef, Side};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{bonds, build_chain, build_dimer, chain_from_dimer, FFModelSpec};
use crate::hilbert::{apply_two_site, commutator_norm, parity_operator, vector_norm, OperatorMatrix};

/// Eigenvalues within this distance of the minimum count as ground states.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Bound on ground energy and per-term residuals for a frustration-free verdict.
pub const FF_TOL: f64 = 1e-9;
/// Eigenvalues above this are in the range of a PSD local term.
pub const RANGE_TOL: f64 = 1e-10;
/// Allowed Hermiticity defect of diagonalizer input.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub ground_energy: f64,
    pub ground_degeneracy: usize,
    /// Distance from the ground energy to the first eigenvalue outside the
    /// degenerate window; 0 when there is none.
    pub gap: f64,
    pub gapless_at_tolerance: bool,
    pub degeneracy_tol: f64,
    /// Orthonormal ground-space basis; not serialized.
    #[serde(skip)]
    pub ground_basis: Vec<Vec<C64>>,
}

impl SpectrumResult {
    fn from_eigenvalues(eigenvalues: Vec<f64>, degeneracy_tol: f64) -> Self {
        let ground_energy = eigenvalues[0];
        let ground_degeneracy = eigenvalues
            .iter()
            .take_while(|&&e| e <= ground_energy + degeneracy_tol)
            .count();
        let first_excited = eigenvalues.get(ground_degeneracy).copied();
        Self {
            ground_energy,
            ground_degeneracy,
            gap: first_excited.map_or(0.0, |e| e - ground_energy),
            gapless_at_tolerance: first_excited.is_none(),
            degeneracy_tol,
            eigenvalues,
            ground_basis: Vec::new(),
        }
    }

    /// Ground basis as the columns of a `2^L × g` matrix.
    pub fn ground_matrix(&self) -> Mat<C64> {
        columns(&self.ground_basis)
    }
}

pub(crate) fn columns(vectors: &[Vec<C64>]) -> Mat<C64> {
    let n = vectors.first().map_or(0, Vec::len);
    Mat::from_fn(n, vectors.len(), |i, j| vectors[j][i])
}

fn check_hermitian(h: &OperatorMatrix) -> Result<()> {
    let residual = h.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

fn linalg(e: impl std::fmt::Debug) -> Error {
    Error::LinearAlgebra(format!("{e:?}"))
}

fn eigenvalues_of(m: MatRef<'_, C64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower).map_err(linalg)
}

/// Full eigendecomposition of a Hermitian operator.
pub fn diagonalize(h: &OperatorMatrix, degeneracy_tol: f64) -> Result<SpectrumResult> {
    check_hermitian(h)?;
    let evd = h.mat().self_adjoint_eigen(Side::Lower).map_err(linalg)?;
    let s = evd.S().column_vector();
    let eigenvalues: Vec<f64> = (0..h.dim()).map(|k| s[k].re).collect();
    let mut result = SpectrumResult::from_eigenvalues(eigenvalues, degeneracy_tol);
    let u = evd.U();
    result.ground_basis = (0..result.ground_degeneracy)
        .map(|k| u.col(k).iter().copied().collect())
        .collect();
    Ok(result)
}

/// Eigenvalues only; the ground basis is left empty.
pub fn spectrum(h: &OperatorMatrix, degeneracy_tol: f64) -> Result<SpectrumResult> {
    check_hermitian(h)?;
    Ok(SpectrumResult::from_eigenvalues(eigenvalues_of(h.mat())?, degeneracy_tol))
}

/// A local term of a chain Hamiltonian: a 2×2 operator on one site or a
/// 4×4 operator on an ordered pair.
#[derive(Debug, Clone)]
pub enum LocalTerm {
    OneSite { site: usize, op: OperatorMatrix },
    TwoSite { a: usize, b: usize, op: OperatorMatrix },
}

impl LocalTerm {
    pub fn apply(&self, sites: usize, state: &[C64]) -> Result<Vec<C64>> {
        match self {
            LocalTerm::TwoSite { a, b, op } => apply_two_site(op, *a, *b, sites, state),
            LocalTerm::OneSite { site, op } => {
                crate::hilbert::embed_one_site(op, *site, sites)?.apply(state)
            }
        }
    }

    pub fn accumulate_into(&self, target: &mut OperatorMatrix) -> Result<()> {
        match self {
            LocalTerm::TwoSite { a, b, op } => crate::hilbert::accumulate_two_site(target, op, *a, *b),
            LocalTerm::OneSite { site, op } => {
                let embedded = crate::hilbert::embed_one_site(op, *site, target.sites())?;
                *target = target.try_add(&embedded)?;
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FFVerdict {
    pub is_ff: bool,
    pub ground_energy: f64,
    pub ground_degeneracy: usize,
    /// Per term: `max_ψ ‖h ψ‖` over the ground basis.
    pub per_dimer_residuals: Vec<f64>,
    pub ff_tol: f64,
}

/// Frustration-freeness of `Σ terms` on `sites` qubits: the ground energy
/// vanishes and every term annihilates every ground vector.
pub fn check_frustration_free_terms(terms: &[LocalTerm], sites: usize, ff_tol: f64) -> Result<FFVerdict> {
    let mut h = OperatorMatrix::zeros(sites)?;
    for t in terms {
        t.accumulate_into(&mut h)?;
    }
    let spec = diagonalize(&h, DEGENERACY_TOL)?;
    let mut residuals = Vec::with_capacity(terms.len());
    for t in terms {
        let mut worst = 0.0f64;
        for v in &spec.ground_basis {
            worst = worst.max(vector_norm(&t.apply(sites, v)?));
        }
        residuals.push(worst);
    }
    Ok(FFVerdict {
        is_ff: spec.ground_energy.abs() <= ff_tol && residuals.iter().all(|&r| r <= ff_tol),
        ground_energy: spec.ground_energy,
        ground_degeneracy: spec.ground_degeneracy,
        per_dimer_residuals: residuals,
        ff_tol,
    })
}

pub fn dimer_terms(spec: &FFModelSpec) -> Result<Vec<LocalTerm>> {
    let dimer = build_dimer(spec)?;
    Ok(bonds(spec.sites, spec.boundary)
        .into_iter()
        .map(|(a, b)| LocalTerm::TwoSite {
            a,
            b,
            op: dimer.clone(),
        })
        .collect())
}

pub fn check_frustration_free(spec: &FFModelSpec) -> Result<FFVerdict> {
    crate::hilbert::check_sites(spec.sites)?;
    check_frustration_free_terms(&dimer_terms(spec)?, spec.sites, FF_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    #[serde(rename = "L")]
    pub sites: usize,
    pub gap: f64,
    pub ground_degeneracy: usize,
    pub ground_energy: f64,
}

/// Gap of the zero-normalized chain for each length, in input order.
pub fn gap_scan(template: &FFModelSpec, lengths: &[usize]) -> Result<Vec<GapPoint>> {
    for &l in lengths {
        crate::hilbert::check_sites(l)?;
    }
    lengths
        .par_iter()
        .map(|&l| {
            let spec = template.with_sites(l)?;
            let s = spectrum(&build_chain(&spec)?, DEGENERACY_TOL)?;
            Ok(GapPoint {
                sites: l,
                gap: s.gap,
                ground_degeneracy: s.ground_degeneracy,
                ground_energy: s.ground_energy,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParitySpectra {
    pub even: Vec<f64>,
    pub odd: Vec<f64>,
}

/// Spectra of `H` restricted to the `±1` eigenspaces of `Z^{⊗L}`.
pub fn parity_resolved_spectrum(h: &OperatorMatrix) -> Result<ParitySpectra> {
    check_hermitian(h)?;
    let residual = commutator_norm(h, &parity_operator(h.sites())?)?;
    if residual > 1e-10 {
        return Err(Error::ParityBreaking { residual });
    }
    let block = |odd: bool| -> Result<Vec<f64>> {
        let idx: Vec<usize> = (0..h.dim()).filter(|k| (k.count_ones() % 2 == 1) == odd).collect();
        let m = Mat::from_fn(idx.len(), idx.len(), |i, j| h.get(idx[i], idx[j]));
        eigenvalues_of(m.as_ref())
    };
    Ok(ParitySpectra {
        even: block(false)?,
        odd: block(true)?,
    })
}

/// Projector onto the eigenvectors of `dimer` with eigenvalue above [`RANGE_TOL`].
pub fn projector_replacement(dimer: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_hermitian(dimer)?;
    let evd = dimer.mat().self_adjoint_eigen(Side::Lower).map_err(linalg)?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let keep: Vec<usize> = (0..dimer.dim()).filter(|&k| s[k].re > RANGE_TOL).collect();
    OperatorMatrix::from_fn(dimer.sites(), |i, j| {
        keep.iter().map(|&k| u[(i, k)] * u[(j, k)].conj()).sum()
    })
}

/// `‖P_U − P_V‖` for orthonormal column bases, evaluated as
/// `max(‖V − U U†V‖, ‖U − V V†U‖)`; this stays accurate for nearly equal
/// subspaces, unlike routes through squared cosines.
pub fn projector_distance(u: MatRef<'_, C64>, v: MatRef<'_, C64>) -> Result<f64> {
    if u.nrows() != v.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "subspaces of spaces of dimension {} and {}",
            u.nrows(),
            v.nrows()
        )));
    }
    let leak = |a: MatRef<'_, C64>, b: MatRef<'_, C64>| -> f64 {
        if b.ncols() == 0 {
            return 0.0;
        }
        let overlap = a.adjoint() * b;
        let r = b - a * &overlap;
        crate::hilbert::spectral_norm(r.as_ref())
    };
    Ok(leak(u, v).max(leak(v, u)))
}

/// Orthonormal basis of the span of `vectors` (columns with singular value
/// above `rel_tol·σ_max` are kept).
pub fn orthonormalize(vectors: &[Vec<C64>], rel_tol: f64) -> Result<Mat<C64>> {
    let m = columns(vectors);
    if m.ncols() == 0 {
        return Ok(m);
    }
    let svd = m.thin_svd().map_err(linalg)?;
    let s = svd.S().column_vector();
    let top = s[0].re;
    let rank = (0..m.ncols()).filter(|&k| s[k].re > rel_tol * top).count();
    Ok(svd.U().subcols(0, rank).to_owned())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaAReport {
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E_tilde")]
    pub e_tilde: f64,
    pub s_min: f64,
    pub h_norm: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub same_kernel: bool,
    pub kernel_distance: f64,
}

/// Compares the chain with its projector-replaced version `H̃ = Σ Π_{i,i+1}`:
/// `‖h‖·Ẽ ≥ E ≥ s·Ẽ` for the smallest positive eigenvalues `E`, `Ẽ`, where
/// `s` and `‖h‖` are the smallest positive and largest eigenvalues of `h`,
/// and both chains share their kernel.
pub fn lemma_a_bounds(spec: &FFModelSpec) -> Result<LemmaAReport> {
    if spec.sites > 10 {
        return Err(Error::TooManySites {
            sites: spec.sites,
            max: 10,
        });
    }
    let dimer = build_dimer(spec)?;
    let dimer_ev = eigenvalues_of(dimer.mat())?;
    let s_min = dimer_ev
        .iter()
        .copied()
        .find(|&e| e > RANGE_TOL)
        .ok_or_else(|| Error::param("dimer", "dimer term is zero"))?;
    let h_norm = dimer_ev[dimer_ev.len() - 1];
    let pairs = bonds(spec.sites, spec.boundary);
    let h = chain_from_dimer(&dimer, spec.sites, &pairs)?;
    let h_tilde = chain_from_dimer(&projector_replacement(&dimer)?, spec.sites, &pairs)?;
    let (a, b) = (diagonalize(&h, DEGENERACY_TOL)?, diagonalize(&h_tilde, DEGENERACY_TOL)?);
    // Relative slack for rounding in the eigenvalues being compared.
    let slack = 1e-10 * (1.0 + h_norm * b.gap);
    let kernel_distance = if a.ground_degeneracy == b.ground_degeneracy {
        projector_distance(a.ground_matrix().as_ref(), b.ground_matrix().as_ref())?
    } else {
        1.0
    };
    Ok(LemmaAReport {
        e: a.gap,
        e_tilde: b.gap,
        s_min,
        h_norm,
        lower_ok: a.gap >= s_min * b.gap - slack,
        upper_ok: h_norm * b.gap >= a.gap - slack,
        same_kernel: a.ground_energy.abs() <= FF_TOL
            && b.ground_energy.abs() <= FF_TOL
            && kernel_distance <= 1e-9,
        kernel_distance,
    })
}

/// Residual `‖H v‖` for each vector.
pub fn kernel_residuals(h: &OperatorMatrix, vectors: &[Vec<C64>]) -> Result<Vec<f64>> {
    vectors.iter().map(|v| Ok(vector_norm(&h.apply(v)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{ModelParams, Sublattice};
    use crate::hilbert::{embed_pauli, Pauli, ZERO};
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn single_z() {
        let s = diagonalize(&embed_pauli(Pauli::Z, 1, 1).unwrap(), DEGENERACY_TOL).unwrap();
        assert_eq!(s.eigenvalues.len(), 2);
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-15 && (s.eigenvalues[1] - 1.0).abs() < 1e-15);
        assert_eq!(s.ground_degeneracy, 1);
        assert!((s.gap - 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_is_gapless_at_tolerance() {
        let s = diagonalize(&OperatorMatrix::identity(2).unwrap(), DEGENERACY_TOL).unwrap();
        assert_eq!(s.ground_degeneracy, 4);
        assert!(s.gapless_at_tolerance);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = OperatorMatrix::from_fn(1, |i, j| if i == 0 && j == 1 { c(1.0) } else { ZERO }).unwrap();
        assert!(matches!(diagonalize(&m, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn type1_and_rank1_degeneracies() {
        let t1 = FFModelSpec::open(6, ModelParams::Type1 { a: 1.0, b: 2.0, omega: PI / 3.0 }).unwrap();
        let s = diagonalize(&build_chain(&t1).unwrap(), DEGENERACY_TOL).unwrap();
        assert!(s.ground_energy.abs() < 1e-10);
        assert_eq!(s.ground_degeneracy, 2);
        let r1 = FFModelSpec::open(5, ModelParams::Rank1 { theta: PI / 4.0 }).unwrap();
        let s = spectrum(&build_chain(&r1).unwrap(), DEGENERACY_TOL).unwrap();
        assert_eq!(s.ground_degeneracy, 6);
    }

    #[test]
    fn ff_verdicts() {
        let t1 = FFModelSpec::open(5, ModelParams::Type1 { a: 0.5, b: 2.0, omega: 2.0 }).unwrap();
        assert!(check_frustration_free(&t1).unwrap().is_ff);
        let r3 = FFModelSpec::open(
            5,
            ModelParams::Rank3 {
                psi: [c(1.0), ZERO],
                eigs: [1.0, 2.0, 3.0],
            },
        )
        .unwrap();
        let v = check_frustration_free(&r3).unwrap();
        assert!(v.is_ff);
        assert_eq!(v.ground_degeneracy, 1);
    }

    #[test]
    fn conflicting_field_is_not_ff() {
        // Dimers |e⟩⟨e|, e = (|01⟩+|10⟩)/√2, want neighbours aligned (or in the
        // singlet); fields |1⟩⟨1| on site 1 and |0⟩⟨0| on site 3 force the ends
        // apart, so some term is always violated.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e = [ZERO, c(s), c(s), ZERO];
        let dimer = crate::hamiltonians::weighted_projectors(&[(1.0, e)]);
        let proj = |k: usize| OperatorMatrix::from_fn(1, |i, j| if i == k && j == k { c(1.0) } else { ZERO }).unwrap();
        let terms = vec![
            LocalTerm::TwoSite { a: 1, b: 2, op: dimer.clone() },
            LocalTerm::TwoSite { a: 2, b: 3, op: dimer },
            LocalTerm::OneSite { site: 1, op: proj(1) },
            LocalTerm::OneSite { site: 3, op: proj(0) },
        ];
        let v = check_frustration_free_terms(&terms, 3, FF_TOL).unwrap();
        assert!(!v.is_ff);
        assert!(v.ground_energy > 1e-3, "{}", v.ground_energy);
    }

    #[test]
    fn parity_sectors() {
        let t1 = FFModelSpec::open(6, ModelParams::Type1 { a: 1.0, b: 1.0, omega: PI / 2.0 }).unwrap();
        let p = parity_resolved_spectrum(&build_chain(&t1).unwrap()).unwrap();
        for (e, o) in p.even.iter().zip(&p.odd) {
            assert!((e - o).abs() < 1e-8);
        }
        let field = embed_pauli(Pauli::Z, 1, 1).unwrap();
        let p = parity_resolved_spectrum(&field).unwrap();
        assert_ne!(p.even, p.odd);
        let x = embed_pauli(Pauli::X, 1, 2).unwrap();
        assert!(matches!(parity_resolved_spectrum(&x), Err(Error::ParityBreaking { .. })));
    }

    #[test]
    fn type2_two_site_sectors() {
        // A = B, γ = π/2: h projects onto the odd sector, so the kernel
        // {|00⟩, |11⟩} is entirely even and the sector ground energies differ.
        let t2 = FFModelSpec::open(2, ModelParams::Type2 { a: 1.0, b: 1.0, gamma: PI / 2.0 }).unwrap();
        let p = parity_resolved_spectrum(&build_chain(&t2).unwrap()).unwrap();
        assert!(p.even.iter().all(|e| e.abs() < 1e-12));
        assert!(p.odd.iter().all(|e| (e - 1.0).abs() < 1e-12));
    }

    #[test]
    fn projectors() {
        let t1 = FFModelSpec::open(2, ModelParams::Type1 { a: 1.0, b: 2.0, omega: 0.9 }).unwrap();
        let d = build_dimer(&t1).unwrap();
        let p = projector_replacement(&d).unwrap();
        let ev = eigenvalues_of(p.mat()).unwrap();
        assert!(ev[0].abs() < 1e-14 && ev[1].abs() < 1e-14);
        assert!((ev[2] - 1.0).abs() < 1e-14 && (ev[3] - 1.0).abs() < 1e-14);
        let pp = projector_replacement(&p).unwrap();
        assert!(pp.max_abs_diff(&p).unwrap() < 1e-14);
    }

    #[test]
    fn lemma_a_examples() {
        let t1 = FFModelSpec::open(5, ModelParams::Type1 { a: 1.0, b: 3.0, omega: PI / 4.0 }).unwrap();
        let r = lemma_a_bounds(&t1).unwrap();
        assert!(r.lower_ok && r.upper_ok && r.same_kernel, "{r:?}");
        let eq = FFModelSpec::open(4, ModelParams::Type1 { a: 1.0, b: 1.0, omega: 1.0 }).unwrap();
        let r = lemma_a_bounds(&eq).unwrap();
        assert!((r.e - r.e_tilde).abs() < 1e-12);
        let r3 = FFModelSpec::open(
            4,
            ModelParams::Rank3 {
                psi: [c(0.6), C64::new(0.0, 0.8)],
                eigs: [0.5, 1.0, 2.0],
            },
        )
        .unwrap();
        let r = lemma_a_bounds(&r3).unwrap();
        assert!((r.s_min - 0.5).abs() < 1e-12 && (r.h_norm - 2.0).abs() < 1e-12);
        assert!(r.lower_ok && r.upper_ok && r.same_kernel, "{r:?}");
    }

    #[test]
    fn gap_scan_keeps_order() {
        let t = FFModelSpec::open(2, ModelParams::CaseIII { a: 1.0, b: 1.0, f: 1.0 }).unwrap();
        let pts = gap_scan(&t, &[6, 4, 5]).unwrap();
        assert_eq!(pts.iter().map(|p| p.sites).collect::<Vec<_>>(), vec![6, 4, 5]);
        for p in pts {
            assert!(p.gap <= 1.0 - (PI / p.sites as f64).cos() + 1e-9, "{p:?}");
        }
    }

    #[test]
    fn distance_basics() {
        let e = |k: usize| {
            let mut v = vec![ZERO; 4];
            v[k] = c(1.0);
            v
        };
        let a = orthonormalize(&[e(0)], 1e-12).unwrap();
        let b = orthonormalize(&[e(1)], 1e-12).unwrap();
        assert!(projector_distance(a.as_ref(), a.as_ref()).unwrap() < 1e-15);
        assert!((projector_distance(a.as_ref(), b.as_ref()).unwrap() - 1.0).abs() < 1e-15);
        let span = orthonormalize(&[e(0), e(1), vec![c(1.0), c(1.0), ZERO, ZERO]], 1e-12).unwrap();
        assert_eq!(span.ncols(), 2);
    }

    #[test]
    fn case_ii_sublattice_spectra_agree() {
        let mk = |sub| {
            FFModelSpec::open(
                5,
                ModelParams::CaseII {
                    a: 1.0,
                    b: 2.0,
                    omega: 1.0,
                    sublattice: sub,
                },
            )
            .unwrap()
        };
        let a = spectrum(&build_chain(&mk(Sublattice::Even)).unwrap(), 1e-9).unwrap();
        let b = spectrum(&build_chain(&mk(Sublattice::Odd)).unwrap(), 1e-9).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
