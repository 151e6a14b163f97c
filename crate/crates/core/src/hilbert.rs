//! Dense operator algebra on an `L`-qubit chain.
//!
//! Basis convention: the computational basis index is read as a binary number
//! with site 1 as the most significant bit, and `|0⟩ = (1, 0)ᵀ`. Every other
//! module relies on this ordering for its sign conventions.
//!
//! Operators are stored densely. Pauli strings are kept symbolically as
//! bit masks so that they can be applied, traced against a dense operator and
//! accumulated into one in `O(2^L)` time.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use faer::{Mat, MatRef, Side};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the chain length accepted by constructors.
pub const DEFAULT_MAX_SITES: usize = 14;

/// Environment variable overriding [`DEFAULT_MAX_SITES`].
pub const MAX_SITES_ENV: &str = "FFMZM_LMAX";

/// Tolerance for operator identities checked with the spectral norm.
pub const ZERO_TOL: f64 = 1e-10;

pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Configured maximum chain length (`FFMZM_LMAX`, default 14).
pub fn max_sites() -> usize {
    std::env::var(MAX_SITES_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v >= 1 && v <= 30)
        .unwrap_or(DEFAULT_MAX_SITES)
}

/// Resource guard shared by every constructor that allocates `2^L` space.
pub fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 {
        return Err(Error::TooFewSites { sites, min: 1 });
    }
    let max = max_sites();
    if sites > max {
        return Err(Error::TooManySites { sites, max });
    }
    Ok(())
}

#[inline]
pub(crate) fn site_bit(site: usize, sites: usize) -> usize {
    1usize << (sites - site)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> [[C64; 2]; 2] {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// `self · other = phase · result`.
    pub fn product(self, other: Pauli) -> (C64, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (ONE, p),
            (X, X) | (Y, Y) | (Z, Z) => (ONE, I),
            (X, Y) => (I_UNIT, Z),
            (Y, X) => (-I_UNIT, Z),
            (Y, Z) => (I_UNIT, X),
            (Z, Y) => (-I_UNIT, X),
            (Z, X) => (I_UNIT, Y),
            (X, Z) => (-I_UNIT, Y),
        }
    }
}

const I_UNIT: C64 = I;

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// A coefficient times a tensor product of single-site Pauli letters.
///
/// `letters[0]` acts on site 1, the leftmost tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    letters: Vec<Pauli>,
    coefficient: C64,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, coefficient: C64) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::TooFewSites { sites: 0, min: 1 });
        }
        if !(coefficient.re.is_finite() && coefficient.im.is_finite()) {
            return Err(Error::param("coefficient", "must be finite"));
        }
        Ok(Self {
            letters,
            coefficient,
        })
    }

    /// Parses a letter string such as `"XIZ"`.
    pub fn parse(letters: &str, coefficient: C64) -> Result<Self> {
        let letters = letters
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::param("letters", format!("unknown Pauli letter {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters, coefficient)
    }

    pub fn identity(sites: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; sites], ONE)
    }

    /// `letter` at `site` (1-based), identity elsewhere.
    pub fn single(letter: Pauli, site: usize, sites: usize) -> Result<Self> {
        if site == 0 || site > sites {
            return Err(Error::SiteOutOfRange { site, sites });
        }
        let mut letters = vec![Pauli::I; sites];
        letters[site - 1] = letter;
        Self::new(letters, ONE)
    }

    pub fn sites(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn coefficient(&self) -> C64 {
        self.coefficient
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            letters: self.letters.clone(),
            coefficient: self.coefficient * factor,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            letters: self.letters.clone(),
            coefficient: self.coefficient.conj(),
        }
    }

    /// Operator product `self · other`.
    pub fn product(&self, other: &PauliString) -> Result<PauliString> {
        if self.sites() != other.sites() {
            return Err(Error::DimensionMismatch(format!(
                "Pauli strings on {} and {} sites",
                self.sites(),
                other.sites()
            )));
        }
        let mut phase = self.coefficient * other.coefficient;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&p, &q)| {
                let (ph, r) = p.product(q);
                phase *= ph;
                r
            })
            .collect();
        Ok(PauliString {
            letters,
            coefficient: phase,
        })
    }

    /// (flip mask, phase mask, number of Y letters).
    fn masks(&self) -> (usize, usize, u32) {
        let n = self.sites();
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut ny = 0u32;
        for (k, p) in self.letters.iter().enumerate() {
            let bit = site_bit(k + 1, n);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    ny += 1;
                }
                Pauli::Z => sign |= bit,
            }
        }
        (flip, sign, ny)
    }

    /// Calls `f(row, col, value)` for the single nonzero entry of every column.
    fn for_each_entry(&self, mut f: impl FnMut(usize, usize, C64)) {
        let (flip, sign, ny) = self.masks();
        let base = self.coefficient * I.powu(ny);
        let dim = 1usize << self.sites();
        for col in 0..dim {
            let v = if (col & sign).count_ones() % 2 == 0 {
                base
            } else {
                -base
            };
            f(col ^ flip, col, v);
        }
    }

    pub(crate) fn accumulate_into(&self, mat: &mut Mat<C64>) {
        self.for_each_entry(|r, c, v| mat[(r, c)] += v);
    }

    pub fn to_matrix(&self) -> Result<OperatorMatrix> {
        check_sites(self.sites())?;
        let mut op = OperatorMatrix::zeros(self.sites())?;
        self.accumulate_into(&mut op.mat);
        Ok(op)
    }

    /// Hilbert-Schmidt inner product `Tr(P† M)`.
    pub fn trace_against(&self, op: &OperatorMatrix) -> Result<C64> {
        if op.sites() != self.sites() {
            return Err(Error::DimensionMismatch(format!(
                "Pauli string on {} sites against operator on {}",
                self.sites(),
                op.sites()
            )));
        }
        let mut acc = ZERO;
        // Tr(P† M) = Σ_c conj(P[r, c]) M[r, c]
        self.for_each_entry(|r, c, v| acc += v.conj() * op.mat[(r, c)]);
        Ok(acc)
    }

    pub fn apply(&self, state: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; state.len()];
        self.for_each_entry(|r, c, v| out[r] += v * state[c]);
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) ", self.coefficient)?;
        for p in &self.letters {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Flat linear combination of Pauli strings on a common chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    sites: usize,
    terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn zero(sites: usize) -> Self {
        Self {
            sites,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(sites: usize, terms: Vec<PauliString>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.sites() != sites) {
            return Err(Error::DimensionMismatch(format!(
                "term on {} sites in a sum over {sites}",
                t.sites()
            )));
        }
        Ok(Self { sites, terms })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            sites: self.sites,
            terms: self.terms.iter().map(|t| t.scaled(factor)).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            sites: self.sites,
            terms: self.terms.iter().map(PauliString::adjoint).collect(),
        }
    }

    pub fn plus(&self, other: &PauliSum) -> Self {
        assert_eq!(self.sites, other.sites, "Pauli sums on different chains");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self {
            sites: self.sites,
            terms,
        }
        .simplified()
    }

    pub fn times(&self, other: &PauliSum) -> Self {
        assert_eq!(self.sites, other.sites, "Pauli sums on different chains");
        let terms = self
            .terms
            .iter()
            .flat_map(|a| {
                other
                    .terms
                    .iter()
                    .map(move |b| a.product(b).expect("equal lengths checked"))
            })
            .collect();
        Self {
            sites: self.sites,
            terms,
        }
        .simplified()
    }

    /// Merges equal letter strings and drops vanishing coefficients.
    pub fn simplified(&self) -> Self {
        let mut merged: BTreeMap<Vec<Pauli>, C64> = BTreeMap::new();
        for t in &self.terms {
            *merged.entry(t.letters.clone()).or_insert(ZERO) += t.coefficient;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.norm() > 1e-15)
            .map(|(letters, coefficient)| PauliString {
                letters,
                coefficient,
            })
            .collect();
        Self {
            sites: self.sites,
            terms,
        }
    }

    pub fn to_matrix(&self) -> Result<OperatorMatrix> {
        check_sites(self.sites)?;
        let mut op = OperatorMatrix::zeros(self.sites)?;
        for t in &self.terms {
            t.accumulate_into(&mut op.mat);
        }
        Ok(op)
    }
}

impl From<PauliString> for PauliSum {
    fn from(p: PauliString) -> Self {
        Self {
            sites: p.sites(),
            terms: vec![p],
        }
    }
}

/// Dense complex operator on the `2^L`-dimensional chain space.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    sites: usize,
    mat: Mat<C64>,
}

impl OperatorMatrix {
    pub fn zeros(sites: usize) -> Result<Self> {
        check_sites(sites)?;
        let dim = 1usize << sites;
        Ok(Self {
            sites,
            mat: Mat::zeros(dim, dim),
        })
    }

    pub fn identity(sites: usize) -> Result<Self> {
        check_sites(sites)?;
        let dim = 1usize << sites;
        Ok(Self {
            sites,
            mat: Mat::identity(dim, dim),
        })
    }

    pub fn from_mat(sites: usize, mat: Mat<C64>) -> Result<Self> {
        check_sites(sites)?;
        let dim = 1usize << sites;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for {sites} sites (expected {dim}x{dim})",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { sites, mat })
    }

    pub fn from_fn(sites: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        check_sites(sites)?;
        let dim = 1usize << sites;
        Ok(Self {
            sites,
            mat: Mat::from_fn(dim, dim, f),
        })
    }

    /// Diagonal operator from a function of the basis index.
    pub fn diagonal(sites: usize, mut f: impl FnMut(usize) -> C64) -> Result<Self> {
        let mut op = Self::zeros(sites)?;
        for k in 0..op.dim() {
            op.mat[(k, k)] = f(k);
        }
        Ok(op)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> MatRef<'_, C64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            sites: self.sites,
            mat: self.mat.adjoint().to_owned(),
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let dim = self.dim();
        Self {
            sites: self.sites,
            mat: Mat::from_fn(dim, dim, |i, j| self.mat[(i, j)] * factor),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|k| self.mat[(k, k)]).sum()
    }

    /// `max |M − M†|` entrywise.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut r = 0.0f64;
        for j in 0..n {
            for i in j..n {
                r = r.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.sites != other.sites {
            return Err(Error::DimensionMismatch(format!(
                "operators on {} and {} sites",
                self.sites, other.sites
            )));
        }
        Ok(())
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        let n = self.dim();
        let mut r = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                r = r.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        Ok(r)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            sites: self.sites,
            mat: &self.mat + &other.mat,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            sites: self.sites,
            mat: &self.mat - &other.mat,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            sites: self.sites,
            mat: &self.mat * &other.mat,
        })
    }

    /// `U · self · U†`.
    pub fn conjugated_by(&self, unitary: &Self) -> Result<Self> {
        self.check_same(unitary)?;
        Ok(Self {
            sites: self.sites,
            mat: &(&unitary.mat * &self.mat) * unitary.mat.adjoint(),
        })
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let sites = self.sites + other.sites;
        check_sites(sites)?;
        let (a, b) = (self.dim(), other.dim());
        Ok(Self {
            sites,
            mat: Mat::from_fn(a * b, a * b, |i, j| {
                self.mat[(i / b, j / b)] * other.mat[(i % b, j % b)]
            }),
        })
    }

    pub fn apply(&self, state: &[C64]) -> Result<Vec<C64>> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for operator of dimension {}",
                state.len(),
                self.dim()
            )));
        }
        let n = self.dim();
        let mut out = vec![ZERO; n];
        for j in 0..n {
            let s = state[j];
            if s == ZERO {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.mat[(i, j)] * s;
            }
        }
        Ok(out)
    }

    /// `⟨u|M|v⟩`.
    pub fn expectation(&self, u: &[C64], v: &[C64]) -> Result<C64> {
        let mv = self.apply(v)?;
        Ok(u.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(self.mat.as_ref())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm_l2()
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_add(rhs).expect("operator dimensions must agree")
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_sub(rhs).expect("operator dimensions must agree")
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.try_mul(rhs).expect("operator dimensions must agree")
    }
}

/// Largest singular value. Normal shortcuts for (anti-)Hermitian input.
pub fn spectral_norm(m: MatRef<'_, C64>) -> f64 {
    let (r, c) = (m.nrows(), m.ncols());
    if r == 0 || c == 0 {
        return 0.0;
    }
    let scale = m.norm_max();
    if scale == 0.0 {
        return 0.0;
    }
    if r == c {
        let mut herm = 0.0f64;
        let mut anti = 0.0f64;
        for j in 0..c {
            for i in j..r {
                let (a, b) = (m[(i, j)], m[(j, i)].conj());
                herm = herm.max((a - b).norm());
                anti = anti.max((a + b).norm());
            }
        }
        let sym = if herm <= 1e-14 * scale {
            Some(Mat::from_fn(r, c, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj())))
        } else if anti <= 1e-14 * scale {
            Some(Mat::from_fn(r, c, |i, j| {
                0.5 * I * (m[(i, j)] - m[(j, i)].conj())
            }))
        } else {
            None
        };
        if let Some(h) = sym {
            if let Ok(ev) = h.self_adjoint_eigenvalues(Side::Lower) {
                return ev.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
            }
        }
    }
    m.singular_values()
        .ok()
        .and_then(|s| s.first().copied())
        .unwrap_or(f64::NAN)
}

/// `letter` at `site` (1-based, site 1 leftmost), identity elsewhere.
pub fn embed_pauli(letter: Pauli, site: usize, sites: usize) -> Result<OperatorMatrix> {
    check_sites(sites)?;
    PauliString::single(letter, site, sites)?.to_matrix()
}

/// Exact linear combination `Σ coefficient · ⊗ letters`.
pub fn assemble(terms: &[PauliString]) -> Result<OperatorMatrix> {
    let first = terms.first().ok_or(Error::EmptyTerms)?;
    let sites = first.sites();
    if let Some(t) = terms.iter().find(|t| t.sites() != sites) {
        return Err(Error::DimensionMismatch(format!(
            "mixed chain lengths {} and {}",
            sites,
            t.sites()
        )));
    }
    let mut op = OperatorMatrix::zeros(sites)?;
    for t in terms {
        t.accumulate_into(&mut op.mat);
    }
    Ok(op)
}

/// `Z^{⊗L}`: `+1` on even-weight basis states, `−1` on odd.
pub fn parity_operator(sites: usize) -> Result<OperatorMatrix> {
    OperatorMatrix::diagonal(sites, |k| parity_sign(k))
}

#[inline]
pub(crate) fn parity_sign(index: usize) -> C64 {
    if index.count_ones() % 2 == 0 {
        ONE
    } else {
        -ONE
    }
}

/// Spectral norm of `AB − BA`.
pub fn commutator_norm(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<f64> {
    a.check_same(b)?;
    let m = &(&a.mat * &b.mat) - &(&b.mat * &a.mat);
    Ok(spectral_norm(m.as_ref()))
}

/// Spectral norm of `AB + BA`.
pub fn anticommutator_norm(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<f64> {
    a.check_same(b)?;
    let m = &(&a.mat * &b.mat) + &(&b.mat * &a.mat);
    Ok(spectral_norm(m.as_ref()))
}

fn two_site_sites(a: usize, b: usize, sites: usize) -> Result<(usize, usize)> {
    check_sites(sites)?;
    for s in [a, b] {
        if s == 0 || s > sites {
            return Err(Error::SiteOutOfRange { site: s, sites });
        }
    }
    if a == b {
        return Err(Error::param("sites", "a two-site term needs two distinct sites"));
    }
    Ok((site_bit(a, sites), site_bit(b, sites)))
}

fn check_local(h: &OperatorMatrix, n: usize) -> Result<()> {
    if h.sites() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected a {n}-site local operator, got {} sites",
            h.sites()
        )));
    }
    Ok(())
}

/// Embeds a 4×4 operator on the ordered site pair `(a, b)`: its first tensor
/// factor acts on `a` and its second on `b`.
pub fn embed_two_site(h: &OperatorMatrix, a: usize, b: usize, sites: usize) -> Result<OperatorMatrix> {
    let mut op = OperatorMatrix::zeros(sites)?;
    accumulate_two_site(&mut op, h, a, b)?;
    Ok(op)
}

/// `target += h_{a,b}` in place.
pub fn accumulate_two_site(target: &mut OperatorMatrix, h: &OperatorMatrix, a: usize, b: usize) -> Result<()> {
    check_local(h, 2)?;
    let sites = target.sites();
    let (ba, bb) = two_site_sites(a, b, sites)?;
    let dim = target.dim();
    for col in 0..dim {
        let lc = 2 * usize::from(col & ba != 0) + usize::from(col & bb != 0);
        let rest = col & !(ba | bb);
        for lr in 0..4 {
            let v = h.mat[(lr, lc)];
            if v == ZERO {
                continue;
            }
            let row = rest | if lr & 2 != 0 { ba } else { 0 } | if lr & 1 != 0 { bb } else { 0 };
            target.mat[(row, col)] += v;
        }
    }
    Ok(())
}

/// `h_{a,b} |ψ⟩` without forming the embedded operator.
pub fn apply_two_site(
    h: &OperatorMatrix,
    a: usize,
    b: usize,
    sites: usize,
    state: &[C64],
) -> Result<Vec<C64>> {
    check_local(h, 2)?;
    let (ba, bb) = two_site_sites(a, b, sites)?;
    if state.len() != 1usize << sites {
        return Err(Error::DimensionMismatch(format!(
            "state of length {} on {sites} sites",
            state.len()
        )));
    }
    let mut out = vec![ZERO; state.len()];
    for (col, &s) in state.iter().enumerate() {
        if s == ZERO {
            continue;
        }
        let lc = 2 * usize::from(col & ba != 0) + usize::from(col & bb != 0);
        let rest = col & !(ba | bb);
        for lr in 0..4 {
            let row = rest | if lr & 2 != 0 { ba } else { 0 } | if lr & 1 != 0 { bb } else { 0 };
            out[row] += h.mat[(lr, lc)] * s;
        }
    }
    Ok(out)
}

/// Embeds a 2×2 operator at `site`.
pub fn embed_one_site(h: &OperatorMatrix, site: usize, sites: usize) -> Result<OperatorMatrix> {
    check_local(h, 1)?;
    check_sites(sites)?;
    if site == 0 || site > sites {
        return Err(Error::SiteOutOfRange { site, sites });
    }
    let bit = site_bit(site, sites);
    let mut op = OperatorMatrix::zeros(sites)?;
    for col in 0..op.dim() {
        let lc = usize::from(col & bit != 0);
        for lr in 0..2 {
            let row = (col & !bit) | if lr == 1 { bit } else { 0 };
            op.mat[(row, col)] += h.mat[(lr, lc)];
        }
    }
    Ok(op)
}

/// Product of per-site single-qubit unitaries (or any 2×2 matrices).
pub fn product_operator(locals: &[[[C64; 2]; 2]]) -> Result<OperatorMatrix> {
    let sites = locals.len();
    check_sites(sites)?;
    OperatorMatrix::from_fn(sites, |r, c| {
        let mut v = ONE;
        for (k, m) in locals.iter().enumerate() {
            let bit = site_bit(k + 1, sites);
            v *= m[usize::from(r & bit != 0)][usize::from(c & bit != 0)];
            if v == ZERO {
                break;
            }
        }
        v
    })
}

/// `|φ_1⟩ ⊗ … ⊗ |φ_L⟩`.
pub fn product_state(factors: &[[C64; 2]]) -> Result<Vec<C64>> {
    let sites = factors.len();
    check_sites(sites)?;
    Ok((0..1usize << sites)
        .map(|idx| {
            factors
                .iter()
                .enumerate()
                .map(|(k, f)| f[usize::from(idx & site_bit(k + 1, sites) != 0)])
                .product()
        })
        .collect())
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &[C64]) -> Vec<C64> {
    let n = vector_norm(v);
    v.iter().map(|x| x / n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn embed_single_site_z() {
        let z = embed_pauli(Pauli::Z, 1, 1).unwrap();
        assert_eq!(z.get(0, 0), ONE);
        assert_eq!(z.get(1, 1), -ONE);
        assert_eq!(z.get(0, 1), ZERO);
    }

    #[test]
    fn embed_x_on_second_site_is_block_antidiagonal() {
        let x = embed_pauli(Pauli::X, 2, 2).unwrap();
        // I ⊗ X
        let expected = [[0., 1., 0., 0.], [1., 0., 0., 0.], [0., 0., 0., 1.], [0., 0., 1., 0.]];
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(x.get(i, j), c(v, 0.0));
            }
        }
    }

    #[test]
    fn y_squares_to_identity() {
        let y = embed_pauli(Pauli::Y, 1, 2).unwrap();
        let id = OperatorMatrix::identity(2).unwrap();
        assert_eq!((&y * &y).max_abs_diff(&id).unwrap(), 0.0);
    }

    #[test]
    fn y_matrix_convention() {
        // Y = -i|0><1| + i|1><0|
        let y = embed_pauli(Pauli::Y, 1, 1).unwrap();
        assert_eq!(y.get(0, 1), -I);
        assert_eq!(y.get(1, 0), I);
    }

    #[test]
    fn embed_errors() {
        assert!(matches!(embed_pauli(Pauli::X, 0, 3), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(embed_pauli(Pauli::X, 4, 3), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(
            embed_pauli(Pauli::X, 1, DEFAULT_MAX_SITES + 40),
            Err(Error::TooManySites { .. })
        ));
    }

    #[test]
    fn assemble_zz() {
        let zz = assemble(&[PauliString::parse("ZZ", ONE).unwrap()]).unwrap();
        let d = [1.0, -1.0, -1.0, 1.0];
        for (k, &v) in d.iter().enumerate() {
            assert_eq!(zz.get(k, k), c(v, 0.0));
        }
    }

    #[test]
    fn assemble_is_linear_in_repeats() {
        let xi = PauliString::parse("XI", ONE).unwrap();
        let two = assemble(&[xi.clone(), xi.clone()]).unwrap();
        let one = assemble(&[xi]).unwrap();
        assert_eq!(two.max_abs_diff(&one.scaled(c(2.0, 0.0))).unwrap(), 0.0);
    }

    #[test]
    fn assemble_errors() {
        assert_eq!(assemble(&[]).unwrap_err(), Error::EmptyTerms);
        let a = PauliString::parse("X", ONE).unwrap();
        let b = PauliString::parse("XX", ONE).unwrap();
        assert!(matches!(assemble(&[a, b]), Err(Error::DimensionMismatch(_))));
        assert!(PauliString::parse("XQ", ONE).is_err());
        assert!(PauliString::new(vec![Pauli::X], c(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn parity_small_cases() {
        let p1 = parity_operator(1).unwrap();
        assert_eq!((p1.get(0, 0), p1.get(1, 1)), (ONE, -ONE));
        let p2 = parity_operator(2).unwrap();
        let d: Vec<f64> = (0..4).map(|k| p2.get(k, k).re).collect();
        assert_eq!(d, vec![1.0, -1.0, -1.0, 1.0]);
        assert!(parity_operator(0).is_err());
    }

    #[test]
    fn parity_is_product_of_site_z() {
        for l in 1..=6 {
            let mut prod = OperatorMatrix::identity(l).unwrap();
            for s in 1..=l {
                prod = &prod * &embed_pauli(Pauli::Z, s, l).unwrap();
            }
            let p = parity_operator(l).unwrap();
            assert_eq!(prod.max_abs_diff(&p).unwrap(), 0.0);
            let id = OperatorMatrix::identity(l).unwrap();
            assert_eq!((&p * &p).max_abs_diff(&id).unwrap(), 0.0);
        }
    }

    #[test]
    fn commutator_examples() {
        let x = embed_pauli(Pauli::X, 1, 1).unwrap();
        let z = embed_pauli(Pauli::Z, 1, 1).unwrap();
        assert!(commutator_norm(&x, &x).unwrap() < 1e-15);
        // [X, Z] = -2iY
        assert!((commutator_norm(&x, &z).unwrap() - 2.0).abs() < 1e-14);
        assert!(anticommutator_norm(&x, &z).unwrap() < 1e-15);
        assert!((anticommutator_norm(&x, &x).unwrap() - 2.0).abs() < 1e-14);
        let z2 = embed_pauli(Pauli::Z, 1, 2).unwrap();
        assert!(commutator_norm(&x, &z2).is_err());
    }

    #[test]
    fn pauli_product_table_matches_matrices() {
        let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for &p in &all {
            for &q in &all {
                let a = PauliString::new(vec![p], ONE).unwrap();
                let b = PauliString::new(vec![q], ONE).unwrap();
                let symbolic = a.product(&b).unwrap().to_matrix().unwrap();
                let dense = &a.to_matrix().unwrap() * &b.to_matrix().unwrap();
                assert!(symbolic.max_abs_diff(&dense).unwrap() < 1e-15, "{p}{q}");
            }
        }
    }

    #[test]
    fn trace_against_recovers_coefficients() {
        let p = PauliString::parse("XYZ", c(0.3, -0.7)).unwrap();
        let m = p.to_matrix().unwrap();
        let t = PauliString::parse("XYZ", ONE).unwrap().trace_against(&m).unwrap();
        assert!((t / 8.0 - c(0.3, -0.7)).norm() < 1e-15);
        let other = PauliString::parse("XYI", ONE).unwrap().trace_against(&m).unwrap();
        assert!(other.norm() < 1e-15);
    }

    #[test]
    fn two_site_embedding_agrees_with_kron() {
        let h = assemble(&[
            PauliString::parse("XY", c(0.5, 0.0)).unwrap(),
            PauliString::parse("ZI", c(0.0, 0.25)).unwrap(),
            PauliString::parse("IX", c(-1.0, 0.0)).unwrap(),
        ])
        .unwrap();
        let id = OperatorMatrix::identity(1).unwrap();
        let kron = id.kron(&h).unwrap().kron(&id).unwrap();
        let emb = embed_two_site(&h, 2, 3, 4).unwrap();
        assert!(emb.max_abs_diff(&kron).unwrap() < 1e-15);
        // reversed pair: first factor on site 3
        let rev = embed_two_site(&h, 3, 2, 4).unwrap();
        let swapped = assemble(&[
            PauliString::parse("IYXI", c(0.5, 0.0)).unwrap(),
            PauliString::parse("IIZI", c(0.0, 0.25)).unwrap(),
            PauliString::parse("IXII", c(-1.0, 0.0)).unwrap(),
        ])
        .unwrap();
        assert!(rev.max_abs_diff(&swapped).unwrap() < 1e-15);
        let psi: Vec<C64> = (0..16).map(|k| c(k as f64, 1.0 - k as f64)).collect();
        let applied = apply_two_site(&h, 3, 2, 4, &psi).unwrap();
        let dense = rev.apply(&psi).unwrap();
        for (a, b) in applied.iter().zip(&dense) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_norm_general_matrix() {
        // Non-normal 2x2 [[0, 3], [0, 0]] has norm 3.
        let m = OperatorMatrix::from_fn(1, |i, j| if (i, j) == (0, 1) { c(3.0, 0.0) } else { ZERO }).unwrap();
        assert!((m.spectral_norm() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn product_state_ordering() {
        // |0⟩ ⊗ |1⟩ = e_1 in the site-1-most-significant ordering
        let v = product_state(&[[ONE, ZERO], [ZERO, ONE]]).unwrap();
        assert_eq!(v, vec![ZERO, ONE, ZERO, ZERO]);
    }
}
