//! Matrix product states for the case (i) ground space.
//!
//! A state on `L` qubits is given by matrices `W_k^{[i]}` of shape
//! `D_k × D_{k+1}`; its amplitudes are `W_1^{[i_1]} ⋯ W_L^{[i_L]}` with
//! `D_1 = D_{L+1} = 1` for open chains, or the trace of that product for
//! the periodic form.

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{check_sites, site_bit, I, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct MpsState {
    /// Per site, the pair `(W^{[0]}, W^{[1]})`.
    site_tensors: Vec<[Mat<C64>; 2]>,
}

impl MpsState {
    pub fn new(site_tensors: Vec<[Mat<C64>; 2]>) -> Result<Self> {
        if site_tensors.is_empty() {
            return Err(Error::TooFewSites { sites: 0, min: 1 });
        }
        for (k, [w0, w1]) in site_tensors.iter().enumerate() {
            if w0.nrows() != w1.nrows() || w0.ncols() != w1.ncols() {
                return Err(Error::DimensionMismatch(format!(
                    "site {}: physical components of shapes {}x{} and {}x{}",
                    k + 1,
                    w0.nrows(),
                    w0.ncols(),
                    w1.nrows(),
                    w1.ncols()
                )));
            }
        }
        for (k, pair) in site_tensors.windows(2).enumerate() {
            if pair[0][0].ncols() != pair[1][0].nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "bond between sites {} and {}: {} columns vs {} rows",
                    k + 1,
                    k + 2,
                    pair[0][0].ncols(),
                    pair[1][0].nrows()
                )));
            }
        }
        Ok(Self { site_tensors })
    }

    pub fn sites(&self) -> usize {
        self.site_tensors.len()
    }

    pub fn physical_dim(&self) -> usize {
        2
    }

    /// Largest bond dimension.
    pub fn bond_dim(&self) -> usize {
        self.site_tensors
            .iter()
            .map(|[w, _]| w.nrows().max(w.ncols()))
            .max()
            .unwrap_or(0)
    }

    pub fn tensor(&self, site: usize, physical: usize) -> &Mat<C64> {
        &self.site_tensors[site - 1][physical]
    }

    pub fn tensors(&self) -> &[[Mat<C64>; 2]] {
        &self.site_tensors
    }

    /// Row-vector first site and column-vector last site.
    pub fn is_open(&self) -> bool {
        self.site_tensors[0][0].nrows() == 1 && self.site_tensors[self.sites() - 1][0].ncols() == 1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MpsRecord::from(self)).expect("plain record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: MpsRecord = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        r.try_into()
    }
}

/// JSON form: every matrix is a list of rows of `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct MpsRecord {
    #[serde(rename = "L")]
    sites: usize,
    bond_dim: usize,
    physical_dim: usize,
    site_tensors: Vec<[Vec<Vec<[f64; 2]>>; 2]>,
}

fn mat_to_rows(m: &Mat<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn rows_to_mat(rows: &[Vec<[f64; 2]>]) -> Result<Mat<C64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("ragged matrix in MPS tensor".into()));
    }
    Ok(Mat::from_fn(rows.len(), ncols, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

impl From<&MpsState> for MpsRecord {
    fn from(m: &MpsState) -> Self {
        Self {
            sites: m.sites(),
            bond_dim: m.bond_dim(),
            physical_dim: 2,
            site_tensors: m
                .site_tensors
                .iter()
                .map(|[a, b]| [mat_to_rows(a), mat_to_rows(b)])
                .collect(),
        }
    }
}

impl TryFrom<MpsRecord> for MpsState {
    type Error = Error;

    fn try_from(r: MpsRecord) -> Result<Self> {
        if r.physical_dim != 2 || r.site_tensors.len() != r.sites {
            return Err(Error::Parse("MPS record: inconsistent L or physical_dim".into()));
        }
        let tensors = r
            .site_tensors
            .iter()
            .map(|[a, b]| Ok([rows_to_mat(a)?, rows_to_mat(b)?]))
            .collect::<Result<Vec<_>>>()?;
        MpsState::new(tensors)
    }
}

fn scalar(v: C64) -> Mat<C64> {
    Mat::from_fn(1, 1, |_, _| v)
}

/// Bond dimension 1 MPS of `φ_1 ⊗ … ⊗ φ_L`.
pub fn product_mps(factors: &[[C64; 2]]) -> Result<MpsState> {
    MpsState::new(factors.iter().map(|f| [scalar(f[0]), scalar(f[1])]).collect())
}

/// `u α^{⊗L} + v β^{⊗L}` with bulk tensors `cos(θ/2)·1`, `i sin(θ/2) Z` and
/// boundaries `cos(θ/2)(u, v)`, `i sin(θ/2)(u, −v)`, `cos(θ/2)(1, 1)ᵀ`,
/// `i sin(θ/2)(1, −1)ᵀ`.
pub fn build_case_i_mps(u: C64, v: C64, theta: f64, sites: usize) -> Result<MpsState> {
    if u == ZERO && v == ZERO {
        return Err(Error::param("u, v", "(u, v) must not both vanish"));
    }
    if !(theta.is_finite() && theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::param("theta", format!("theta must lie in open interval (0, π) (got {theta})")));
    }
    if sites < 2 {
        return Err(Error::TooFewSites { sites, min: 2 });
    }
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = I * (theta / 2.0).sin();
    let row = |a: C64, b: C64| Mat::from_fn(1, 2, |_, j| if j == 0 { a } else { b });
    let col = |a: C64, b: C64| Mat::from_fn(2, 1, |i, _| if i == 0 { a } else { b });
    let diag = |a: C64, b: C64| Mat::from_fn(2, 2, |i, j| if i != j { ZERO } else if i == 0 { a } else { b });
    let mut tensors = vec![[row(c * u, c * v), row(s * u, -s * v)]];
    for _ in 2..sites {
        tensors.push([diag(c, c), diag(s, -s)]);
    }
    tensors.push([col(c, c), col(s, -s)]);
    MpsState::new(tensors)
}

fn bond_product(mps: &MpsState, index: usize) -> Mat<C64> {
    let l = mps.sites();
    let mut acc = mps.site_tensors[0][usize::from(index & site_bit(1, l) != 0)].clone();
    for k in 2..=l {
        acc = &acc * &mps.site_tensors[k - 1][usize::from(index & site_bit(k, l) != 0)];
    }
    acc
}

/// Open-boundary contraction to the `2^L` state vector.
pub fn contract(mps: &MpsState) -> Result<Vec<C64>> {
    check_sites(mps.sites())?;
    if !mps.is_open() {
        return Err(Error::DimensionMismatch(
            "open contraction needs a 1-row first site and a 1-column last site".into(),
        ));
    }
    Ok((0..1usize << mps.sites()).map(|idx| bond_product(mps, idx)[(0, 0)]).collect())
}

/// `Tr(W_1^{[i_1]} ⋯ W_L^{[i_L]})` for every bit string.
pub fn contract_trace(mps: &MpsState) -> Result<Vec<C64>> {
    check_sites(mps.sites())?;
    let first = &mps.site_tensors[0][0];
    let last = &mps.site_tensors[mps.sites() - 1][0];
    if first.nrows() != last.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "trace needs matching outer bonds, got {} and {}",
            first.nrows(),
            last.ncols()
        )));
    }
    Ok((0..1usize << mps.sites())
        .map(|idx| {
            let p = bond_product(mps, idx);
            (0..p.nrows()).map(|k| p[(k, k)]).sum()
        })
        .collect())
}

fn scaled(m: &Mat<C64>, factor: C64) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| factor * m[(i, j)])
}

fn block_diag(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (r, c) = (a.nrows(), a.ncols());
    Mat::from_fn(r + b.nrows(), c + b.ncols(), |i, j| match (i < r, j < c) {
        (true, true) => a[(i, j)],
        (false, false) => b[(i - r, j - c)],
        _ => ZERO,
    })
}

/// MPS of `u|ψ_1⟩ + v|ψ_2⟩`, with the coefficients attached to site 1.
///
/// Open inputs give a row at site 1, block-diagonal bulk and a stacked
/// column at site L; otherwise every site is block-diagonal (trace form).
pub fn superpose(m1: &MpsState, m2: &MpsState, u: C64, v: C64) -> Result<MpsState> {
    if m1.sites() != m2.sites() {
        return Err(Error::DimensionMismatch(format!(
            "superposing MPSs on {} and {} sites",
            m1.sites(),
            m2.sites()
        )));
    }
    let l = m1.sites();
    let open = m1.is_open() && m2.is_open() && l >= 2;
    let tensors = (0..l)
        .map(|k| {
            let pick = |p: usize| {
                let (a, b) = (&m1.site_tensors[k][p], &m2.site_tensors[k][p]);
                if open && k == 0 {
                    Mat::from_fn(1, a.ncols() + b.ncols(), |_, j| {
                        if j < a.ncols() {
                            u * a[(0, j)]
                        } else {
                            v * b[(0, j - a.ncols())]
                        }
                    })
                } else if open && k == l - 1 {
                    Mat::from_fn(a.nrows() + b.nrows(), 1, |i, _| {
                        if i < a.nrows() {
                            a[(i, 0)]
                        } else {
                            b[(i - a.nrows(), 0)]
                        }
                    })
                } else if k == 0 {
                    block_diag(&scaled(a, u), &scaled(b, v))
                } else {
                    block_diag(a, b)
                }
            };
            [pick(0), pick(1)]
        })
        .collect();
    MpsState::new(tensors)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub injective: bool,
    pub attained_rank: usize,
    pub full_rank: usize,
    pub block_len: usize,
}

/// Dimension of the span of all `block_len`-fold products of the bulk tensor
/// inside `D × D` matrices; injective iff it is `D²`.
pub fn injectivity_check(mps: &MpsState, block_len: usize) -> Result<InjectivityReport> {
    if block_len == 0 || block_len > 12 {
        return Err(Error::param("block_len", "block length must lie in 1..=12"));
    }
    let l = mps.sites();
    let bulk: Vec<&[Mat<C64>; 2]> = if l >= 3 {
        mps.site_tensors[1..l - 1].iter().collect()
    } else {
        mps.site_tensors.iter().collect()
    };
    let w = bulk[0];
    let d = w[0].nrows();
    if w[0].ncols() != d {
        return Err(Error::param("mps", "bulk tensors are not square"));
    }
    if bulk.iter().any(|t| t[0] != w[0] || t[1] != w[1]) {
        return Err(Error::param("mps", "bulk tensors are not translationally uniform"));
    }
    let count = 1usize << block_len;
    let mut span = Mat::<C64>::zeros(d * d, count);
    for word in 0..count {
        let mut p = Mat::<C64>::identity(d, d);
        for k in 0..block_len {
            p = &p * &w[(word >> k) & 1];
        }
        for i in 0..d {
            for j in 0..d {
                span[(i * d + j, word)] = p[(i, j)];
            }
        }
    }
    let sv = span
        .singular_values()
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > 1e-10 * top.max(f64::MIN_POSITIVE)).count();
    let full = d * d;
    Ok(InjectivityReport {
        injective: rank == full,
        attained_rank: rank,
        full_rank: full,
        block_len,
    })
}

/// `|ψ⟩` with every amplitude multiplied by the parity `(−1)^{popcount}`.
pub fn parity_image(state: &[C64]) -> Vec<C64> {
    state
        .iter()
        .enumerate()
        .map(|(k, &x)| if k.count_ones() % 2 == 0 { x } else { -x })
        .collect()
}

/// `α = cos(θ/2)|0⟩ + i sin(θ/2)|1⟩` and `β = cos(θ/2)|0⟩ − i sin(θ/2)|1⟩`.
pub fn alpha_beta(theta: f64) -> ([C64; 2], [C64; 2]) {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    ([C64::new(c, 0.0), I * s], [C64::new(c, 0.0), -I * s])
}
