//! Jordan-Wigner fermions on the qubit chain.
//!
//! `c_j = Z_1⋯Z_{j−1} |0⟩⟨1|_j`, so that `Z_j = 1 − 2n_j`,
//! `X_j = Z_1⋯Z_{j−1}(c_j† + c_j)` and `Y_j = i Z_1⋯Z_{j−1}(c_j† − c_j)`.
//! The Majoranas `a_j = c_j + c_j†` and `b_j = −i(c_j − c_j†)` are then the
//! single Pauli strings `Z⋯Z X_j` and `Z⋯Z Y_j`.
//!
//! Operators are kept as [`PauliSum`]s and densified on demand; fermionic
//! Hamiltonians are assembled by multiplying these symbolic operators, which
//! is an independent route from the Pauli expansions in
//! [`crate::hamiltonians`].

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::Sublattice;
use crate::hilbert::{check_sites, site_bit, OperatorMatrix, Pauli, PauliString, PauliSum, I, ONE};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Jordan-Wigner creation, annihilation and Majorana operators on `L` sites.
#[derive(Debug, Clone)]
pub struct FermionOpSet {
    sites: usize,
    a: Vec<PauliString>,
    b: Vec<PauliString>,
}

/// Builds the operator dictionary for `L` sites.
pub fn build_fermion_ops(sites: usize) -> Result<FermionOpSet> {
    FermionOpSet::new(sites)
}

impl FermionOpSet {
    pub fn new(sites: usize) -> Result<Self> {
        check_sites(sites)?;
        let string = |j: usize, last: Pauli| {
            let mut letters = vec![Pauli::I; sites];
            for l in letters.iter_mut().take(j - 1) {
                *l = Pauli::Z;
            }
            letters[j - 1] = last;
            PauliString::new(letters, ONE).expect("nonempty")
        };
        Ok(Self {
            sites,
            a: (1..=sites).map(|j| string(j, Pauli::X)).collect(),
            b: (1..=sites).map(|j| string(j, Pauli::Y)).collect(),
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    fn check(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.sites {
            return Err(Error::SiteOutOfRange {
                site: j,
                sites: self.sites,
            });
        }
        Ok(())
    }

    /// Majorana `a_j` (1-based).
    pub fn a(&self, j: usize) -> Result<&PauliString> {
        self.check(j)?;
        Ok(&self.a[j - 1])
    }

    /// Majorana `b_j` (1-based).
    pub fn b(&self, j: usize) -> Result<&PauliString> {
        self.check(j)?;
        Ok(&self.b[j - 1])
    }

    /// Majorana `γ_k` in the interleaved order `(a_1, b_1, a_2, b_2, …)`, 0-based.
    pub fn majorana(&self, k: usize) -> Result<&PauliString> {
        if k / 2 >= self.sites {
            return Err(Error::SiteOutOfRange {
                site: k / 2 + 1,
                sites: self.sites,
            });
        }
        Ok(if k % 2 == 0 { &self.a[k / 2] } else { &self.b[k / 2] })
    }

    /// `c_j = (a_j + i b_j)/2`.
    pub fn c(&self, j: usize) -> Result<PauliSum> {
        self.check(j)?;
        PauliSum::from_terms(
            self.sites,
            vec![self.a[j - 1].scaled(re(0.5)), self.b[j - 1].scaled(I * 0.5)],
        )
    }

    /// `c_j† = (a_j − i b_j)/2`.
    pub fn cdag(&self, j: usize) -> Result<PauliSum> {
        Ok(self.c(j)?.adjoint())
    }

    /// `n_j = c_j† c_j`.
    pub fn number(&self, j: usize) -> Result<PauliSum> {
        Ok(self.cdag(j)?.times(&self.c(j)?))
    }

    /// `2n_j − 1`.
    pub fn occupation_sign(&self, j: usize) -> Result<PauliSum> {
        Ok(self
            .number(j)?
            .scaled(re(2.0))
            .plus(&PauliString::identity(self.sites)?.scaled(-ONE).into()))
    }

    /// `c_j† c_k + c_k† c_j`.
    pub fn hopping(&self, j: usize, k: usize) -> Result<PauliSum> {
        let forward = self.cdag(j)?.times(&self.c(k)?);
        Ok(forward.plus(&forward.adjoint()))
    }

    /// `c_j c_k + c_k† c_j†`.
    pub fn pairing(&self, j: usize, k: usize) -> Result<PauliSum> {
        let pair = self.c(j)?.times(&self.c(k)?);
        Ok(pair.plus(&pair.adjoint()))
    }

    pub fn c_matrix(&self, j: usize) -> Result<OperatorMatrix> {
        self.c(j)?.to_matrix()
    }

    pub fn cdag_matrix(&self, j: usize) -> Result<OperatorMatrix> {
        self.cdag(j)?.to_matrix()
    }

    pub fn a_matrix(&self, j: usize) -> Result<OperatorMatrix> {
        self.a(j)?.to_matrix()
    }

    pub fn b_matrix(&self, j: usize) -> Result<OperatorMatrix> {
        self.b(j)?.to_matrix()
    }

    /// `(−1)^F = Π_j (1 − 2n_j)`, built from the number operators.
    pub fn fermion_parity(&self) -> Result<OperatorMatrix> {
        let mut acc: PauliSum = PauliString::identity(self.sites)?.into();
        for j in 1..=self.sites {
            acc = acc.times(&self.occupation_sign(j)?.scaled(-ONE));
        }
        acc.to_matrix()
    }
}

/// Couplings of the interacting Kitaev chain
/// `H′ = Σ[−t(c_j†c_{j+1} + h.c.) + Δ(c_jc_{j+1} + h.c.)] − ½Σ μ_j(2n_j − 1)
///       + U Σ(2n_j − 1)(2n_{j+1} − 1)`,
/// with `μ_j = mu_edge` at `j ∈ {1, L}` and `mu_bulk` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KitaevParams {
    pub t: f64,
    pub delta: f64,
    pub u_int: f64,
    pub mu_bulk: f64,
    pub mu_edge: f64,
    #[serde(rename = "L")]
    pub sites: usize,
}

impl KitaevParams {
    pub fn with_couplings(self, t: f64, delta: f64) -> Self {
        Self { t, delta, ..self }
    }

    pub fn mu(&self, j: usize) -> f64 {
        if j == 1 || j == self.sites {
            self.mu_edge
        } else {
            self.mu_bulk
        }
    }
}

/// `t = 2A, Δ = −2B sin ω, U = B − A, μ_bulk = 4B cos ω, μ_edge = 2B cos ω`.
pub fn kitaev_params_from_spin(a: f64, b: f64, omega: f64, sites: usize) -> Result<KitaevParams> {
    for (name, v) in [("A", a), ("B", b)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::param(name, format!("{name} must be a positive real (got {v})")));
        }
    }
    if !(omega.is_finite() && omega > 0.0 && omega < PI) {
        return Err(Error::param(
            "omega",
            format!("omega must lie in open interval (0, π) (got {omega})"),
        ));
    }
    if sites < 2 {
        return Err(Error::TooFewSites { sites, min: 2 });
    }
    let mu_bulk = 4.0 * b * omega.cos();
    Ok(KitaevParams {
        t: 2.0 * a,
        delta: -2.0 * b * omega.sin(),
        u_int: b - a,
        mu_bulk,
        mu_edge: mu_bulk / 2.0,
        sites,
    })
}

/// Symbolic form of [`build_fermionic_chain`].
pub fn fermionic_chain_sum(p: &KitaevParams) -> Result<PauliSum> {
    if p.sites < 2 {
        return Err(Error::TooFewSites { sites: p.sites, min: 2 });
    }
    let ops = FermionOpSet::new(p.sites)?;
    let mut h = PauliSum::zero(p.sites);
    for j in 1..p.sites {
        h = h
            .plus(&ops.hopping(j, j + 1)?.scaled(re(-p.t)))
            .plus(&ops.pairing(j, j + 1)?.scaled(re(p.delta)))
            .plus(&ops.occupation_sign(j)?.times(&ops.occupation_sign(j + 1)?).scaled(re(p.u_int)));
    }
    for j in 1..=p.sites {
        h = h.plus(&ops.occupation_sign(j)?.scaled(re(-0.5 * p.mu(j))));
    }
    Ok(h)
}

pub fn build_fermionic_chain(p: &KitaevParams) -> Result<OperatorMatrix> {
    fermionic_chain_sum(p)?.to_matrix()
}

/// Case (iii) chain
/// `Σ (A − Br)(2n_i − 1) + (A + Br)(2n_{i+1} − 1) − 4Bf/(1+f²)(c_i†c_{i+1} + h.c.)
///    + (A − B)(2n_i − 1)(2n_{i+1} − 1)` with `r = (1 − f²)/(1 + f²)`.
pub fn build_case_iii_fermionic(a: f64, b: f64, f: f64, sites: usize) -> Result<OperatorMatrix> {
    for (name, v) in [("A", a), ("B", b)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::param(name, format!("{name} must be a positive real (got {v})")));
        }
    }
    if !f.is_finite() || f == 0.0 {
        return Err(Error::param("f", "f must be nonzero"));
    }
    if sites < 2 {
        return Err(Error::TooFewSites { sites, min: 2 });
    }
    let ops = FermionOpSet::new(sites)?;
    let r = (1.0 - f * f) / (1.0 + f * f);
    let hop = -4.0 * b * f / (1.0 + f * f);
    let mut h = PauliSum::zero(sites);
    for i in 1..sites {
        let (si, sj) = (ops.occupation_sign(i)?, ops.occupation_sign(i + 1)?);
        h = h
            .plus(&si.scaled(re(a - b * r)))
            .plus(&sj.scaled(re(a + b * r)))
            .plus(&ops.hopping(i, i + 1)?.scaled(re(hop)))
            .plus(&si.times(&sj).scaled(re(a - b)));
    }
    h.to_matrix()
}

/// `H′(s) = Σ h′(s)_{i,i+1}` with
/// `h′(s) = −2A[(c_i†c_{i+1} + h.c.) + (1+2s) sin ω (c_ic_{i+1} + h.c.)
///          + (1+2s) cos ω (n_i + n_{i+1} − 1) − s(2n_i − 1)(2n_{i+1} − 1)]`,
/// where `s = (B − A)/2A`.
pub fn hprime_s_family(a: f64, omega: f64, s: f64, sites: usize) -> Result<OperatorMatrix> {
    if !(s.is_finite() && s > -0.5) {
        return Err(Error::param("s", format!("s must exceed -1/2 (got {s})")));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::param("A", format!("A must be a positive real (got {a})")));
    }
    if !(omega.is_finite() && omega > 0.0 && omega < PI) {
        return Err(Error::param(
            "omega",
            format!("omega must lie in open interval (0, π) (got {omega})"),
        ));
    }
    if sites < 2 {
        return Err(Error::TooFewSites { sites, min: 2 });
    }
    let ops = FermionOpSet::new(sites)?;
    let one: PauliSum = PauliString::identity(sites)?.into();
    let k = 1.0 + 2.0 * s;
    let mut h = PauliSum::zero(sites);
    for i in 1..sites {
        let filling = ops.number(i)?.plus(&ops.number(i + 1)?).plus(&one.scaled(-ONE));
        let bond = ops
            .hopping(i, i + 1)?
            .plus(&ops.pairing(i, i + 1)?.scaled(re(k * omega.sin())))
            .plus(&filling.scaled(re(k * omega.cos())))
            .plus(&ops.occupation_sign(i)?.times(&ops.occupation_sign(i + 1)?).scaled(re(-s)));
        h = h.plus(&bond.scaled(re(-2.0 * a)));
    }
    h.to_matrix()
}

/// `B = A(1 + 2s)`.
pub fn b_from_s(a: f64, s: f64) -> f64 {
    a * (1.0 + 2.0 * s)
}

/// `s = (B − A)/2A`.
pub fn s_from_ab(a: f64, b: f64) -> f64 {
    (b - a) / (2.0 * a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignTransform {
    /// `V^{⊗L}` with `V = |0⟩⟨0| + i|1⟩⟨1|`: `c_j → i c_j`, flips Δ.
    GaugeV,
    /// Pauli `Z` on odd sites: `c_j → (−1)^j c_j`, flips t and Δ.
    Sublattice,
    /// Both of the above: flips t only.
    Both,
}

/// Diagonal unitary implementing `transform`.
pub fn sign_transform_unitary(sites: usize, transform: SignTransform) -> Result<OperatorMatrix> {
    let odd: usize = (1..=sites)
        .filter(|&j| Sublattice::Odd.contains(j))
        .map(|j| site_bit(j, sites))
        .sum();
    let use_v = matches!(transform, SignTransform::GaugeV | SignTransform::Both);
    let use_z = matches!(transform, SignTransform::Sublattice | SignTransform::Both);
    OperatorMatrix::diagonal(sites, |k| {
        let mut phase = ONE;
        if use_v {
            phase *= I.powu(k.count_ones());
        }
        if use_z && (k & odd).count_ones() % 2 == 1 {
            phase = -phase;
        }
        phase
    })
}

/// `U H U†` for the unitary of [`sign_transform_unitary`].
pub fn sign_transforms(h: &OperatorMatrix, transform: SignTransform) -> Result<OperatorMatrix> {
    h.conjugated_by(&sign_transform_unitary(h.sites(), transform)?)
}
