//! Closed-form ground spaces and their comparison with numerical kernels.
//!
//! With `α = cos(θ/2)|0⟩ + i sin(θ/2)|1⟩` and `β = Zα`:
//!
//! * case (i), `Type1`: `{α^{⊗L}, β^{⊗L}}` where `θ` and `ω` are related by
//!   [`omega_from_theta`](crate::hamiltonians::omega_from_theta);
//! * case (ii): the alternating products `αβαβ…`, `βαβα…`;
//! * case (iii): `|0…0⟩` and `Σ_k f^k |0…0 1_{k+1} 0…0⟩`;
//! * `Type2`: `|0…0⟩`, `|1…1⟩`; `Rank3`: `ψ^{⊗L}`;
//! * `Rank1`: one vector per excitation number `n`, summing `Π_j w^j` over
//!   occupied positions with `w = −tan(θ/2)`.
//!
//! Spans are compared only through their orthogonal projectors since the
//! natural bases are not orthogonal.

use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{bonds, build_dimer, chain_from_dimer, theta_from_omega, Boundary, FFModelSpec, ModelParams, Sublattice};
use crate::hilbert::{check_sites, inner, normalized, product_state, site_bit, vector_norm, I, ONE, ZERO};
use crate::spectral::{columns, diagonalize, orthonormalize, projector_distance, DEGENERACY_TOL, FF_TOL};

/// Linearly independent, not necessarily orthogonal, vectors on `L` sites.
#[derive(Debug, Clone)]
pub struct AnalyticSpan {
    pub sites: usize,
    pub vectors: Vec<Vec<C64>>,
    pub labels: Vec<String>,
}

impl AnalyticSpan {
    pub fn new(sites: usize, vectors: Vec<Vec<C64>>, labels: Vec<String>) -> Result<Self> {
        let dim = 1usize << sites;
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} on {sites} sites",
                v.len()
            )));
        }
        let span = Self { sites, vectors, labels };
        let det = span.gram_determinant()?;
        if det <= 1e-12 {
            return Err(Error::param(
                "span",
                format!("vectors are linearly dependent (normalized Gram determinant {det:e})"),
            ));
        }
        Ok(span)
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Gram matrix `G_{jk} = ⟨v_j|v_k⟩`.
    pub fn gram(&self) -> Mat<C64> {
        let n = self.vectors.len();
        Mat::from_fn(n, n, |j, k| inner(&self.vectors[j], &self.vectors[k]))
    }

    /// Determinant of the Gram matrix of the normalized vectors.
    pub fn gram_determinant(&self) -> Result<f64> {
        let unit: Vec<Vec<C64>> = self.vectors.iter().map(|v| normalized(v)).collect();
        if unit.is_empty() {
            return Ok(1.0);
        }
        // det G = Π σ_k² for the matrix with the vectors as columns.
        let s = columns(&unit)
            .singular_values()
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
        Ok(s.iter().map(|x| x * x).product())
    }

    /// Orthonormal basis of the span, as columns.
    pub fn orthonormal_basis(&self) -> Result<Mat<C64>> {
        orthonormalize(&self.vectors, 1e-12)
    }
}

fn alpha_beta(theta: f64) -> Result<([C64; 2], [C64; 2])> {
    if !(theta.is_finite() && theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::param(
            "theta",
            format!("theta must lie in open interval (0, π) (got {theta}); at the endpoints α and β coincide"),
        ));
    }
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    Ok(([C64::new(c, 0.0), I * s], [C64::new(c, 0.0), -I * s]))
}

/// `{α^{⊗L}, β^{⊗L}}`.
pub fn case_i_span(theta: f64, sites: usize) -> Result<AnalyticSpan> {
    check_sites(sites)?;
    let (a, b) = alpha_beta(theta)?;
    AnalyticSpan::new(
        sites,
        vec![product_state(&vec![a; sites])?, product_state(&vec![b; sites])?],
        vec!["alpha^L".into(), "beta^L".into()],
    )
}

/// Alternating products; with `Sublattice::Even` the first vector is
/// `αβαβ…`, i.e. `Z` on even sites applied to `α^{⊗L}`.
pub fn case_ii_span(theta: f64, sites: usize, sublattice: Sublattice) -> Result<AnalyticSpan> {
    check_sites(sites)?;
    let (a, b) = alpha_beta(theta)?;
    let pattern = |first_is_alpha: bool| -> Vec<[C64; 2]> {
        (1..=sites)
            .map(|j| if sublattice.contains(j) != first_is_alpha { a } else { b })
            .collect()
    };
    let label = |v: &[[C64; 2]]| {
        v.iter()
            .map(|x| if *x == a { 'a' } else { 'b' })
            .collect::<String>()
    };
    let (p, q) = (pattern(true), pattern(false));
    AnalyticSpan::new(
        sites,
        vec![product_state(&p)?, product_state(&q)?],
        vec![label(&p), label(&q)],
    )
}

/// `{|0…0⟩, N Σ_{k=0}^{L−1} f^k |0…1_{k+1}…0⟩}`.
pub fn case_iii_span(f: f64, sites: usize) -> Result<AnalyticSpan> {
    check_sites(sites)?;
    if !f.is_finite() || f == 0.0 {
        return Err(Error::param("f", "f must be nonzero"));
    }
    let dim = 1usize << sites;
    let mut vacuum = vec![ZERO; dim];
    vacuum[0] = ONE;
    let mut single = vec![ZERO; dim];
    for k in 0..sites {
        single[site_bit(k + 1, sites)] = C64::new(f.powi(k as i32), 0.0);
    }
    AnalyticSpan::new(
        sites,
        vec![vacuum, normalized(&single)],
        vec!["vacuum".into(), "f-weighted single excitation".into()],
    )
}

/// `{|0…0⟩, |1…1⟩}`.
pub fn type2_span(sites: usize) -> Result<AnalyticSpan> {
    check_sites(sites)?;
    let dim = 1usize << sites;
    let mut zeros = vec![ZERO; dim];
    zeros[0] = ONE;
    let mut ones = vec![ZERO; dim];
    ones[dim - 1] = ONE;
    AnalyticSpan::new(sites, vec![zeros, ones], vec!["0^L".into(), "1^L".into()])
}

/// `{ψ^{⊗L}}`.
pub fn rank3_span(psi: [C64; 2], sites: usize) -> Result<AnalyticSpan> {
    check_sites(sites)?;
    AnalyticSpan::new(sites, vec![product_state(&vec![psi; sites])?], vec!["psi^L".into()])
}

/// The `(L+1)`-dimensional kernel of the rank-one chain with
/// `e = cos(θ/2)|01⟩ + sin(θ/2)|10⟩`: the dimer condition
/// `cos(θ/2)ψ(…01…) + sin(θ/2)ψ(…10…) = 0` is solved by weights `w^j` per
/// occupied site `j`.
pub fn rank1_span(theta: f64, sites: usize) -> Result<AnalyticSpan> {
    check_sites(sites)?;
    if !(theta.is_finite() && theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::param("theta", format!("theta must lie in open interval (0, π) (got {theta})")));
    }
    let w = -(theta / 2.0).tan();
    let dim = 1usize << sites;
    let mut vectors = vec![vec![ZERO; dim]; sites + 1];
    for (idx, amp) in (0..dim).map(|idx| {
        let weight: f64 = (1..=sites)
            .filter(|&j| idx & site_bit(j, sites) != 0)
            .map(|j| w.powi(j as i32))
            .product();
        (idx, weight)
    }) {
        vectors[idx.count_ones() as usize][idx] = C64::new(amp, 0.0);
    }
    let vectors = vectors.iter().map(|v| normalized(v)).collect();
    AnalyticSpan::new(sites, vectors, (0..=sites).map(|n| format!("n={n}")).collect())
}

/// Closed-form ground space of any family.
pub fn analytic_span(spec: &FFModelSpec) -> Result<AnalyticSpan> {
    spec.validate()?;
    match spec.params {
        ModelParams::Type1 { omega, .. } => case_i_span(theta_from_omega(omega)?, spec.sites),
        ModelParams::CaseII { omega, sublattice, .. } => case_ii_span(theta_from_omega(omega)?, spec.sites, sublattice),
        ModelParams::CaseIII { f, .. } => case_iii_span(f, spec.sites),
        ModelParams::Type2 { .. } => type2_span(spec.sites),
        ModelParams::Rank3 { psi, .. } => rank3_span(psi, spec.sites),
        ModelParams::Rank1 { theta } => rank1_span(theta, spec.sites),
    }
}

fn apply_parity(v: &[C64]) -> Vec<C64> {
    v.iter()
        .enumerate()
        .map(|(k, &x)| if k.count_ones() % 2 == 0 { x } else { -x })
        .collect()
}

/// Normalized `v_1 + v_2` (parity +1) and `v_1 − v_2` (parity −1) for a pair
/// with `v_2 = Z^{⊗L} v_1`.
pub fn parity_combinations(span: &AnalyticSpan) -> Result<AnalyticSpan> {
    if span.dim() != 2 {
        return Err(Error::param("span", format!("expected a pair of vectors, got {}", span.dim())));
    }
    let (v1, v2) = (&span.vectors[0], &span.vectors[1]);
    let image = apply_parity(v1);
    let mismatch = image.iter().zip(v2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if mismatch > 1e-12 * vector_norm(v1).max(1.0) {
        return Err(Error::param(
            "span",
            format!("second vector is not the parity image of the first (residual {mismatch:e})"),
        ));
    }
    let plus: Vec<C64> = v1.iter().zip(v2).map(|(a, b)| a + b).collect();
    let minus: Vec<C64> = v1.iter().zip(v2).map(|(a, b)| a - b).collect();
    AnalyticSpan::new(
        span.sites,
        vec![normalized(&plus), normalized(&minus)],
        vec!["even".into(), "odd".into()],
    )
}

/// `‖P_1 − P_2‖` between an analytic span and an orthonormal basis.
pub fn subspace_distance(span: &AnalyticSpan, basis: MatRef<'_, C64>) -> Result<f64> {
    let u = span.orthonormal_basis()?;
    if u.nrows() != basis.nrows() || u.ncols() != basis.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "span of dimension {} in {} vs basis of dimension {} in {}",
            u.ncols(),
            u.nrows(),
            basis.ncols(),
            basis.nrows()
        )));
    }
    projector_distance(u.as_ref(), basis)
}

/// Orthonormal basis of the numerical zero-energy eigenspace of the chain.
pub fn numerical_kernel(spec: &FFModelSpec) -> Result<Mat<C64>> {
    let h = crate::hamiltonians::build_chain(spec)?;
    let s = diagonalize(&h, DEGENERACY_TOL)?;
    if s.ground_energy.abs() > FF_TOL {
        return Ok(Mat::zeros(h.dim(), 0));
    }
    Ok(s.ground_matrix())
}

/// Norm of the projection onto the permutation-symmetric subspace, which is
/// spanned by the normalized Dicke states.
pub fn symmetric_weight(v: &[C64], sites: usize) -> f64 {
    let mut by_count = vec![ZERO; sites + 1];
    let mut sizes = vec![0usize; sites + 1];
    for (k, &x) in v.iter().enumerate() {
        let n = k.count_ones() as usize;
        by_count[n] += x;
        sizes[n] += 1;
    }
    by_count
        .iter()
        .zip(&sizes)
        .map(|(s, &m)| s.norm_sqr() / m as f64)
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingReport {
    pub extra_pairs: Vec<(usize, usize)>,
    pub open_deg: usize,
    pub closed_deg: usize,
    pub closed_ground_energy: f64,
    pub gs_preserved: bool,
    /// Projector distance between the two kernels when their dimensions agree.
    pub kernel_distance: Option<f64>,
    /// `‖P_closed |0…0⟩‖²`.
    pub vacuum_weight: f64,
}

/// Diagonalizes the open chain and the chain with the dimer added on each of
/// `extra_pairs` (first tensor factor on the first site of the pair).
pub fn coupling_experiment(spec: &FFModelSpec, extra_pairs: &[(usize, usize)]) -> Result<CouplingReport> {
    let open_spec = spec.with_boundary(Boundary::Open);
    let dimer = build_dimer(&open_spec)?;
    let mut pairs = bonds(spec.sites, Boundary::Open);
    let open = diagonalize(&chain_from_dimer(&dimer, spec.sites, &pairs)?, DEGENERACY_TOL)?;
    pairs.extend_from_slice(extra_pairs);
    let closed = diagonalize(&chain_from_dimer(&dimer, spec.sites, &pairs)?, DEGENERACY_TOL)?;
    let zero_energy = |e: f64| e.abs() <= FF_TOL;
    let kernel_distance = (open.ground_degeneracy == closed.ground_degeneracy)
        .then(|| projector_distance(open.ground_matrix().as_ref(), closed.ground_matrix().as_ref()))
        .transpose()?;
    let vacuum_weight = closed.ground_basis.iter().map(|v| v[0].norm_sqr()).sum();
    Ok(CouplingReport {
        extra_pairs: extra_pairs.to_vec(),
        open_deg: open.ground_degeneracy,
        closed_deg: closed.ground_degeneracy,
        closed_ground_energy: closed.ground_energy,
        gs_preserved: zero_energy(open.ground_energy)
            && zero_energy(closed.ground_energy)
            && kernel_distance.is_some_and(|d| d <= 1e-8),
        kernel_distance,
        vacuum_weight,
    })
}

/// Closes the chain with `h_{L,1}`.
pub fn closed_chain_experiment(spec: &FFModelSpec) -> Result<CouplingReport> {
    match spec.params {
        ModelParams::Type1 { .. } | ModelParams::CaseII { .. } | ModelParams::CaseIII { .. } => {}
        _ => {
            return Err(Error::Unsupported(format!(
                "closed-chain experiment is defined for type1, case2 and case3, not {}",
                spec.family()
            )))
        }
    }
    if spec.sites < 3 {
        return Err(Error::TooFewSites { sites: spec.sites, min: 3 });
    }
    coupling_experiment(spec, &[(spec.sites, 1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{build_chain, omega_from_theta};
    use crate::spectral::kernel_residuals;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn case_i_single_site() {
        let s = case_i_span(FRAC_PI_2, 1).unwrap();
        let r = FRAC_1_SQRT_2;
        assert!(close(s.vectors[0][0], C64::new(r, 0.0)) && close(s.vectors[0][1], C64::new(0.0, r)));
        assert!(close(s.vectors[1][1], C64::new(0.0, -r)));
    }

    #[test]
    fn case_i_in_type1_kernel() {
        let theta = PI / 3.0;
        let spec = FFModelSpec::open(4, ModelParams::Type1 { a: 1.0, b: 2.0, omega: omega_from_theta(theta).unwrap() }).unwrap();
        let span = case_i_span(theta, 4).unwrap();
        for r in kernel_residuals(&build_chain(&spec).unwrap(), &span.vectors).unwrap() {
            assert!(r < 1e-10);
        }
        assert_eq!(apply_parity(&span.vectors[0]), span.vectors[1]);
    }

    #[test]
    fn parity_pair() {
        let p = parity_combinations(&case_i_span(FRAC_PI_2, 2).unwrap()).unwrap();
        let even = &p.vectors[0];
        assert!(even[1].norm() < 1e-15 && even[2].norm() < 1e-15);
        assert!(inner(&p.vectors[0], &p.vectors[1]).norm() < 1e-15);
        let odd = &p.vectors[1];
        assert!(even.iter().zip(apply_parity(even)).all(|(a, b)| close(*a, b)));
        assert!(odd.iter().zip(apply_parity(odd)).all(|(a, b)| close(-*a, b)));
        assert!(parity_combinations(&type2_span(3).unwrap()).is_err());
    }

    #[test]
    fn case_ii_is_sublattice_image() {
        for sub in [Sublattice::Even, Sublattice::Odd] {
            let theta = 1.1;
            let c1 = case_i_span(theta, 5).unwrap();
            let c2 = case_ii_span(theta, 5, sub).unwrap();
            let zbar = crate::hamiltonians::sublattice_z(5, sub).unwrap();
            for (a, b) in c1.vectors.iter().zip(&c2.vectors) {
                let img = zbar.apply(a).unwrap();
                assert!(img.iter().zip(b).all(|(x, y)| close(*x, *y)));
            }
            let spec = FFModelSpec::open(
                5,
                ModelParams::CaseII { a: 1.0, b: 2.0, omega: omega_from_theta(theta).unwrap(), sublattice: sub },
            )
            .unwrap();
            for r in kernel_residuals(&build_chain(&spec).unwrap(), &c2.vectors).unwrap() {
                assert!(r < 1e-10);
            }
        }
        assert_eq!(case_ii_span(FRAC_PI_2, 2, Sublattice::Even).unwrap().labels[0], "ab");
    }

    #[test]
    fn case_iii_vectors() {
        let s = case_iii_span(1.0, 2).unwrap();
        assert!(close(s.vectors[1][1], C64::new(FRAC_1_SQRT_2, 0.0)) && close(s.vectors[1][2], C64::new(FRAC_1_SQRT_2, 0.0)));
        let s = case_iii_span(2.0, 3).unwrap();
        let n = 21f64.sqrt();
        // positions 1, 2, 3 are bits 4, 2, 1
        for (idx, w) in [(4, 1.0), (2, 2.0), (1, 4.0)] {
            assert!(close(s.vectors[1][idx], C64::new(w / n, 0.0)));
        }
        let spec = FFModelSpec::open(5, ModelParams::CaseIII { a: 1.0, b: 2.0, f: 2.0 }).unwrap();
        let span = case_iii_span(2.0, 5).unwrap();
        for r in kernel_residuals(&build_chain(&spec).unwrap(), &span.vectors).unwrap() {
            assert!(r < 1e-10);
        }
        assert!(symmetric_weight(&span.vectors[1], 5) < 1.0 - 1e-3);
        assert!((symmetric_weight(&case_iii_span(1.0, 5).unwrap().vectors[1], 5) - 1.0).abs() < 1e-12);
        assert!(case_iii_span(0.0, 3).is_err());
    }

    #[test]
    fn distances() {
        let s = case_i_span(1.0, 3).unwrap();
        let b = s.orthonormal_basis().unwrap();
        assert!(subspace_distance(&s, b.as_ref()).unwrap() < 1e-15);
        let t = type2_span(3).unwrap();
        let e0 = AnalyticSpan::new(3, vec![t.vectors[0].clone()], vec![]).unwrap();
        let e1 = AnalyticSpan::new(3, vec![t.vectors[1].clone()], vec![]).unwrap();
        let d = subspace_distance(&e0, e1.orthonormal_basis().unwrap().as_ref()).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        assert!(subspace_distance(&e0, b.as_ref()).is_err());
    }

    #[test]
    fn every_family_matches_its_kernel() {
        let specs = [
            ModelParams::Type1 { a: 1.0, b: 2.0, omega: 1.0 },
            ModelParams::Type2 { a: 1.0, b: 0.3, gamma: 2.0 },
            ModelParams::CaseII { a: 0.5, b: 2.0, omega: 2.5, sublattice: Sublattice::Odd },
            ModelParams::CaseIII { a: 1.0, b: 2.0, f: -0.7 },
            ModelParams::Rank1 { theta: 0.4 },
            ModelParams::Rank3 { psi: [C64::new(0.6, 0.0), C64::new(0.0, 0.8)], eigs: [1.0, 2.0, 3.0] },
        ];
        for p in specs {
            for l in 2..=6 {
                let spec = FFModelSpec::open(l, p.clone()).unwrap();
                let d = subspace_distance(&analytic_span(&spec).unwrap(), numerical_kernel(&spec).unwrap().as_ref()).unwrap();
                assert!(d <= 1e-8, "{:?} L={l}: {d:e}", spec.family());
            }
        }
    }

    #[test]
    fn gram_overlap_decays() {
        let theta = 1.2;
        for l in 1..=6 {
            let g = case_i_span(theta, l).unwrap().gram();
            assert!((g[(0, 1)].norm() - theta.cos().abs().powi(l as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_chains() {
        let t1 = FFModelSpec::open(6, ModelParams::Type1 { a: 1.0, b: 2.0, omega: PI / 3.0 }).unwrap();
        let r = closed_chain_experiment(&t1).unwrap();
        assert_eq!((r.open_deg, r.closed_deg), (2, 2));
        assert!(r.gs_preserved);
        let r = coupling_experiment(&t1, &[(2, 5)]).unwrap();
        assert!(r.gs_preserved, "{r:?}");
        let c3 = FFModelSpec::open(6, ModelParams::CaseIII { a: 1.0, b: 1.0, f: 2.0 }).unwrap();
        let r = closed_chain_experiment(&c3).unwrap();
        assert_eq!((r.open_deg, r.closed_deg), (2, 1));
        assert!(!r.gs_preserved);
        assert!(r.vacuum_weight >= 1.0 - 1e-10);
        let t2 = FFModelSpec::open(6, ModelParams::Type2 { a: 1.0, b: 1.0, gamma: 1.0 }).unwrap();
        assert!(closed_chain_experiment(&t2).is_err());
    }
}
