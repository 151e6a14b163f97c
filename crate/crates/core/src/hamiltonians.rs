//! Frustration-free, parity-conserving nearest-neighbour chains in the spin
//! picture.
//!
//! Each family is described by its two-site term `h`, positive semidefinite
//! with smallest eigenvalue zero, and the chain is `H = Σ_i h_{i,i+1}`. The
//! families are
//!
//! * `Rank1`: `h = |e⟩⟨e|`, `e = cos(θ/2)|01⟩ + sin(θ/2)|10⟩`, `θ ∈ (0, π/2)`;
//! * `Type1`: `A|Ψ⟩⟨Ψ| + B|Φ⟩⟨Φ|` with the singlet `Ψ` and
//!   `Φ = cos(ω/2)|00⟩ + sin(ω/2)|11⟩`;
//! * `Type2`: `Ψ = cos(γ/2)|01⟩ + sin(γ/2)|10⟩`, `Φ = sin(γ/2)|01⟩ − cos(γ/2)|10⟩`;
//! * `CaseII`: the `Type1` chain conjugated by Pauli `Z` on one sublattice;
//! * `CaseIII`: `A|11⟩⟨11| + B|ν⟩⟨ν|`, `ν ∝ |01⟩ − f|10⟩`;
//! * `Rank3`: `Σ_j λ_j |e_j⟩⟨e_j|` with kernel `|ψ⟩⊗|ψ⟩`.
//!
//! The explicit Pauli expansions `H′` (with `H = ¼[(L−1)(A+B)·1 + H′]`) are
//! built separately from plain Pauli strings so that they can serve as an
//! independent check on the projector construction.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    accumulate_two_site, assemble, check_sites, commutator_norm, embed_pauli, OperatorMatrix, Pauli,
    PauliString, ONE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Closed,
}

/// Sites carrying the Pauli `Z` of the case (ii) transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sublattice {
    #[default]
    Even,
    Odd,
}

impl Sublattice {
    pub fn contains(self, site: usize) -> bool {
        match self {
            Sublattice::Even => site % 2 == 0,
            Sublattice::Odd => site % 2 == 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "rank1")]
    Rank1,
    #[serde(rename = "type1")]
    Type1,
    #[serde(rename = "type2")]
    Type2,
    #[serde(rename = "case2", alias = "caseii")]
    CaseII,
    #[serde(rename = "case3", alias = "caseiii")]
    CaseIII,
    #[serde(rename = "rank3")]
    Rank3,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Rank1 => "rank1",
            Family::Type1 => "type1",
            Family::Type2 => "type2",
            Family::CaseII => "case2",
            Family::CaseIII => "case3",
            Family::Rank3 => "rank3",
        }
    }

    /// Rank of the two-site term.
    pub fn dimer_rank(self) -> usize {
        match self {
            Family::Rank1 => 1,
            Family::Rank3 => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rank1" => Ok(Family::Rank1),
            "type1" => Ok(Family::Type1),
            "type2" => Ok(Family::Type2),
            "case2" | "caseii" => Ok(Family::CaseII),
            "case3" | "caseiii" => Ok(Family::CaseIII),
            "rank3" => Ok(Family::Rank3),
            other => Err(Error::Parse(format!(
                "unknown family {other:?} (expected one of rank1, type1, type2, case2, case3, rank3)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Rank1 { theta: f64 },
    Type1 { a: f64, b: f64, omega: f64 },
    Type2 { a: f64, b: f64, gamma: f64 },
    CaseII { a: f64, b: f64, omega: f64, sublattice: Sublattice },
    CaseIII { a: f64, b: f64, f: f64 },
    Rank3 { psi: [C64; 2], eigs: [f64; 3] },
}

impl ModelParams {
    pub fn family(&self) -> Family {
        match self {
            ModelParams::Rank1 { .. } => Family::Rank1,
            ModelParams::Type1 { .. } => Family::Type1,
            ModelParams::Type2 { .. } => Family::Type2,
            ModelParams::CaseII { .. } => Family::CaseII,
            ModelParams::CaseIII { .. } => Family::CaseIII,
            ModelParams::Rank3 { .. } => Family::Rank3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelParams::Rank1 { theta } => open_interval("theta", theta, 0.0, FRAC_PI_2, "(0, π/2)"),
            ModelParams::Type1 { a, b, omega } | ModelParams::CaseII { a, b, omega, .. } => {
                positive("A", a)?;
                positive("B", b)?;
                open_interval("omega", omega, 0.0, PI, "(0, π)")
            }
            ModelParams::Type2 { a, b, gamma } => {
                positive("A", a)?;
                positive("B", b)?;
                open_interval("gamma", gamma, 0.0, PI, "(0, π)")
            }
            ModelParams::CaseIII { a, b, f } => {
                positive("A", a)?;
                positive("B", b)?;
                if !f.is_finite() || f == 0.0 {
                    return Err(Error::param("f", "f must be nonzero"));
                }
                Ok(())
            }
            ModelParams::Rank3 { psi, eigs } => {
                let norm = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
                if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
                    return Err(Error::param("psi", format!("psi must have unit norm (got {norm})")));
                }
                for (k, &e) in eigs.iter().enumerate() {
                    positive(&format!("eigs[{k}]"), e)?;
                }
                Ok(())
            }
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(field, format!("{field} must be a positive real (got {v})")))
    }
}

fn open_interval(field: &str, v: f64, lo: f64, hi: f64, shown: &str) -> Result<()> {
    if v.is_finite() && v > lo && v < hi {
        Ok(())
    } else {
        Err(Error::param(field, format!("{field} must lie in open interval {shown} (got {v})")))
    }
}

/// A fully specified model: family parameters, chain length and boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRecord", into = "SpecRecord")]
pub struct FFModelSpec {
    pub sites: usize,
    pub boundary: Boundary,
    pub params: ModelParams,
}

impl FFModelSpec {
    pub fn new(sites: usize, boundary: Boundary, params: ModelParams) -> Result<Self> {
        let spec = Self {
            sites,
            boundary,
            params,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn open(sites: usize, params: ModelParams) -> Result<Self> {
        Self::new(sites, Boundary::Open, params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::TooFewSites {
                sites: self.sites,
                min: 2,
            });
        }
        self.params.validate()
    }

    pub fn family(&self) -> Family {
        self.params.family()
    }

    pub fn with_sites(&self, sites: usize) -> Result<Self> {
        Self::new(sites, self.boundary, self.params.clone())
    }

    pub fn with_boundary(&self, boundary: Boundary) -> Self {
        Self {
            boundary,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialization cannot fail")
    }
}

/// Parses and validates the canonical JSON encoding
/// `{"family": …, "L": n, "boundary": …, "params": {…}}`.
pub fn parse_spec(json_text: &str) -> Result<FFModelSpec> {
    serde_json::from_str(json_text).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpecRecord {
    family: Family,
    #[serde(rename = "L")]
    sites: usize,
    #[serde(default)]
    boundary: Boundary,
    params: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Rank1Record {
    theta: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Type1Record {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    omega: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Type2Record {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    gamma: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseIIRecord {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    omega: f64,
    #[serde(default)]
    sublattice: Sublattice,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseIIIRecord {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    f: f64,
}

fn default_psi() -> [[f64; 2]; 2] {
    [[1.0, 0.0], [0.0, 0.0]]
}

fn default_eigs() -> [f64; 3] {
    [1.0; 3]
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Rank3Record {
    /// `[[re, im], [re, im]]` amplitudes of `|0⟩`, `|1⟩`.
    #[serde(default = "default_psi")]
    psi: [[f64; 2]; 2],
    #[serde(default = "default_eigs")]
    eigs: [f64; 3],
}

impl TryFrom<SpecRecord> for FFModelSpec {
    type Error = Error;

    fn try_from(r: SpecRecord) -> Result<Self> {
        fn params<T: for<'de> Deserialize<'de>>(family: Family, v: serde_json::Value) -> Result<T> {
            serde_json::from_value(v).map_err(|e| Error::Parse(format!("params for {family}: {e}")))
        }
        let p = match r.family {
            Family::Rank1 => {
                let p: Rank1Record = params(r.family, r.params)?;
                ModelParams::Rank1 { theta: p.theta }
            }
            Family::Type1 => {
                let p: Type1Record = params(r.family, r.params)?;
                ModelParams::Type1 {
                    a: p.a,
                    b: p.b,
                    omega: p.omega,
                }
            }
            Family::Type2 => {
                let p: Type2Record = params(r.family, r.params)?;
                ModelParams::Type2 {
                    a: p.a,
                    b: p.b,
                    gamma: p.gamma,
                }
            }
            Family::CaseII => {
                let p: CaseIIRecord = params(r.family, r.params)?;
                ModelParams::CaseII {
                    a: p.a,
                    b: p.b,
                    omega: p.omega,
                    sublattice: p.sublattice,
                }
            }
            Family::CaseIII => {
                let p: CaseIIIRecord = params(r.family, r.params)?;
                ModelParams::CaseIII { a: p.a, b: p.b, f: p.f }
            }
            Family::Rank3 => {
                let p: Rank3Record = params(r.family, r.params)?;
                ModelParams::Rank3 {
                    psi: [C64::new(p.psi[0][0], p.psi[0][1]), C64::new(p.psi[1][0], p.psi[1][1])],
                    eigs: p.eigs,
                }
            }
        };
        FFModelSpec::new(r.sites, r.boundary, p)
    }
}

impl From<FFModelSpec> for SpecRecord {
    fn from(s: FFModelSpec) -> Self {
        let family = s.family();
        let params = match s.params {
            ModelParams::Rank1 { theta } => serde_json::to_value(Rank1Record { theta }),
            ModelParams::Type1 { a, b, omega } => serde_json::to_value(Type1Record { a, b, omega }),
            ModelParams::Type2 { a, b, gamma } => serde_json::to_value(Type2Record { a, b, gamma }),
            ModelParams::CaseII {
                a,
                b,
                omega,
                sublattice,
            } => serde_json::to_value(CaseIIRecord {
                a,
                b,
                omega,
                sublattice,
            }),
            ModelParams::CaseIII { a, b, f } => serde_json::to_value(CaseIIIRecord { a, b, f }),
            ModelParams::Rank3 { psi, eigs } => serde_json::to_value(Rank3Record {
                psi: [[psi[0].re, psi[0].im], [psi[1].re, psi[1].im]],
                eigs,
            }),
        }
        .expect("plain records serialize");
        SpecRecord {
            family,
            sites: s.sites,
            boundary: s.boundary,
            params,
        }
    }
}

/// Two-qubit amplitudes in the order `|00⟩, |01⟩, |10⟩, |11⟩`.
pub type TwoQubitState = [C64; 4];

fn real4(v: [f64; 4]) -> TwoQubitState {
    v.map(|x| C64::new(x, 0.0))
}

/// `Σ_k w_k |v_k⟩⟨v_k|` as a two-site operator.
pub fn weighted_projectors(terms: &[(f64, TwoQubitState)]) -> OperatorMatrix {
    OperatorMatrix::from_fn(2, |i, j| {
        terms
            .iter()
            .map(|(w, v)| *w * v[i] * v[j].conj())
            .sum()
    })
    .expect("two sites always fit")
}

fn singlet() -> TwoQubitState {
    real4([0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0])
}

fn z_on_first() -> OperatorMatrix {
    embed_pauli(Pauli::Z, 1, 2).expect("two sites always fit")
}

/// The two-site term `h`, PSD with smallest eigenvalue 0.
pub fn build_dimer(spec: &FFModelSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    Ok(match spec.params {
        ModelParams::Rank1 { theta } => {
            let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            weighted_projectors(&[(1.0, real4([0.0, c, s, 0.0]))])
        }
        ModelParams::Type1 { a, b, omega } => type1_dimer(a, b, omega),
        ModelParams::Type2 { a, b, gamma } => {
            let (c, s) = ((gamma / 2.0).cos(), (gamma / 2.0).sin());
            weighted_projectors(&[(a, real4([0.0, c, s, 0.0])), (b, real4([0.0, s, -c, 0.0]))])
        }
        // Z on either site of the pair gives the same term because h commutes with Z⊗Z.
        ModelParams::CaseII { a, b, omega, .. } => type1_dimer(a, b, omega).conjugated_by(&z_on_first())?,
        ModelParams::CaseIII { a, b, f } => {
            let n = (1.0 + f * f).sqrt();
            weighted_projectors(&[
                (a, real4([0.0, 0.0, 0.0, 1.0])),
                (b, real4([0.0, 1.0 / n, -f / n, 0.0])),
            ])
        }
        ModelParams::Rank3 { psi, eigs } => {
            let perp = [-psi[1].conj(), psi[0].conj()];
            let pair = |u: [C64; 2], v: [C64; 2]| [u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]];
            weighted_projectors(&[
                (eigs[0], pair(psi, perp)),
                (eigs[1], pair(perp, psi)),
                (eigs[2], pair(perp, perp)),
            ])
        }
    })
}

fn type1_dimer(a: f64, b: f64, omega: f64) -> OperatorMatrix {
    let phi = real4([(omega / 2.0).cos(), 0.0, 0.0, (omega / 2.0).sin()]);
    weighted_projectors(&[(a, singlet()), (b, phi)])
}

/// Site pairs carrying a dimer: `(i, i+1)` for `i < L`, plus `(L, 1)` when closed.
pub fn bonds(sites: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut pairs: Vec<_> = (1..sites).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Closed {
        pairs.push((sites, 1));
    }
    pairs
}

/// `Σ_{(a,b)} h_{a,b}` over the given ordered pairs.
pub fn chain_from_dimer(dimer: &OperatorMatrix, sites: usize, pairs: &[(usize, usize)]) -> Result<OperatorMatrix> {
    let mut h = OperatorMatrix::zeros(sites)?;
    for &(a, b) in pairs {
        accumulate_two_site(&mut h, dimer, a, b)?;
    }
    Ok(h)
}

/// The zero-normalized chain `H = Σ h_{i,i+1}` (plus `h_{L,1}` when closed).
pub fn build_chain(spec: &FFModelSpec) -> Result<OperatorMatrix> {
    check_sites(spec.sites)?;
    let dimer = build_dimer(spec)?;
    chain_from_dimer(&dimer, spec.sites, &bonds(spec.sites, spec.boundary))
}

/// `ω(θ)` from `cos(ω/2) = sin²(θ/2) / √(sin⁴(θ/2) + cos⁴(θ/2))`.
pub fn omega_from_theta(theta: f64) -> Result<f64> {
    open_interval("theta", theta, 0.0, PI, "(0, π)")?;
    let s2 = (theta / 2.0).sin().powi(2);
    let c2 = (theta / 2.0).cos().powi(2);
    // atan2 form keeps full precision near both endpoints.
    Ok(2.0 * c2.atan2(s2))
}

/// Inverse of [`omega_from_theta`]: `tan²(θ/2) = cot(ω/2)`.
pub fn theta_from_omega(omega: f64) -> Result<f64> {
    open_interval("omega", omega, 0.0, PI, "(0, π)")?;
    let half = omega / 2.0;
    Ok(2.0 * (half.cos().sqrt()).atan2(half.sin().sqrt()))
}

fn pair_string(sites: usize, i: usize, j: usize, p: Pauli, q: Pauli, coeff: f64) -> Result<PauliString> {
    let mut letters = vec![Pauli::I; sites];
    letters[i - 1] = p;
    letters[j - 1] = q;
    PauliString::new(letters, C64::new(coeff, 0.0))
}

fn field_string(sites: usize, i: usize, coeff: f64) -> Result<PauliString> {
    PauliString::single(Pauli::Z, i, sites).map(|p| p.scaled(C64::new(coeff, 0.0)))
}

fn assemble_sites(sites: usize, terms: Vec<PauliString>) -> Result<OperatorMatrix> {
    check_sites(sites)?;
    if terms.is_empty() {
        return OperatorMatrix::zeros(sites);
    }
    assemble(&terms)
}

/// Pauli-string terms of an XYZ bond with fields `(z_left, z_right)`.
#[allow(clippy::too_many_arguments)]
fn bond_terms(
    sites: usize,
    i: usize,
    j: usize,
    xx: f64,
    yy: f64,
    zz: f64,
    z_left: f64,
    z_right: f64,
    out: &mut Vec<PauliString>,
) -> Result<()> {
    out.push(pair_string(sites, i, j, Pauli::X, Pauli::X, xx)?);
    out.push(pair_string(sites, i, j, Pauli::Y, Pauli::Y, yy)?);
    out.push(pair_string(sites, i, j, Pauli::Z, Pauli::Z, zz)?);
    out.push(field_string(sites, i, z_left)?);
    out.push(field_string(sites, j, z_right)?);
    Ok(())
}

/// `H′ = Σ B cos ω (Z_i + Z_{i+1}) − (A − B sin ω) XX − (A + B sin ω) YY − (A − B) ZZ`.
pub fn type1_hprime(a: f64, b: f64, omega: f64, sites: usize) -> Result<OperatorMatrix> {
    let (s, c) = omega.sin_cos();
    let mut terms = Vec::new();
    for i in 1..sites {
        bond_terms(sites, i, i + 1, -(a - b * s), -(a + b * s), -(a - b), b * c, b * c, &mut terms)?;
    }
    assemble_sites(sites, terms)
}

/// `H′ = Σ (A−B)[cos γ (Z_i − Z_{i+1}) + sin γ (XX + YY)] − (A+B) ZZ`.
pub fn type2_hprime(a: f64, b: f64, gamma: f64, sites: usize) -> Result<OperatorMatrix> {
    let (s, c) = gamma.sin_cos();
    let d = a - b;
    let mut terms = Vec::new();
    for i in 1..sites {
        bond_terms(sites, i, i + 1, d * s, d * s, -(a + b), d * c, -d * c, &mut terms)?;
    }
    assemble_sites(sites, terms)
}

/// Case (iii) bond, with `r = (1 − f²)/(1 + f²)`:
/// `−(A − Br) Z_i − (A + Br) Z_{i+1} − 2Bf/(1+f²)(XX + YY) + (A − B) ZZ`.
pub fn case_iii_hprime(a: f64, b: f64, f: f64, sites: usize) -> Result<OperatorMatrix> {
    let r = (1.0 - f * f) / (1.0 + f * f);
    let hop = -2.0 * b * f / (1.0 + f * f);
    let mut terms = Vec::new();
    for i in 1..sites {
        bond_terms(sites, i, i + 1, hop, hop, a - b, -(a - b * r), -(a + b * r), &mut terms)?;
    }
    assemble_sites(sites, terms)
}

/// `H′ = Σ cos θ (Z_i − Z_{i+1}) + sin θ (XX + YY) − ZZ`.
pub fn rank1_hprime(theta: f64, sites: usize) -> Result<OperatorMatrix> {
    let (s, c) = theta.sin_cos();
    let mut terms = Vec::new();
    for i in 1..sites {
        bond_terms(sites, i, i + 1, s, s, -1.0, c, -c, &mut terms)?;
    }
    assemble_sites(sites, terms)
}

/// Diagonal `Z̄`: Pauli `Z` on every site of `sublattice`.
pub fn sublattice_z(sites: usize, sublattice: Sublattice) -> Result<OperatorMatrix> {
    let mask: usize = (1..=sites)
        .filter(|&s| sublattice.contains(s))
        .map(|s| crate::hilbert::site_bit(s, sites))
        .sum();
    OperatorMatrix::diagonal(sites, |k| if (k & mask).count_ones() % 2 == 0 { ONE } else { -ONE })
}

/// The explicit Pauli form `H′` of an open chain and the per-bond constant `c`
/// such that `H = ¼[(L−1)·c·1 + H′]`.
pub fn hprime(spec: &FFModelSpec) -> Result<(OperatorMatrix, f64)> {
    spec.validate()?;
    let l = spec.sites;
    match spec.params {
        ModelParams::Type1 { a, b, omega } => Ok((type1_hprime(a, b, omega, l)?, a + b)),
        ModelParams::Type2 { a, b, gamma } => Ok((type2_hprime(a, b, gamma, l)?, a + b)),
        ModelParams::CaseII {
            a,
            b,
            omega,
            sublattice,
        } => {
            let zbar = sublattice_z(l, sublattice)?;
            Ok((type1_hprime(a, b, omega, l)?.conjugated_by(&zbar)?, a + b))
        }
        ModelParams::CaseIII { a, b, f } => Ok((case_iii_hprime(a, b, f, l)?, a + b)),
        ModelParams::Rank1 { theta } => Ok((rank1_hprime(theta, l)?, 1.0)),
        ModelParams::Rank3 { .. } => Err(Error::Unsupported(
            "no explicit Pauli expansion is provided for the rank-3 family".into(),
        )),
    }
}

/// `H = ¼[(L−1)·c·1 + H′]`.
pub fn shift_hprime(hprime: &OperatorMatrix, bond_constant: f64) -> Result<OperatorMatrix> {
    let l = hprime.sites();
    let shift = OperatorMatrix::identity(l)?.scaled(C64::new((l - 1) as f64 * bond_constant, 0.0));
    Ok((&shift + hprime).scaled(C64::new(0.25, 0.0)))
}

/// Inverse of [`shift_hprime`]: `H′ = 4H − (L−1)·c·1`.
pub fn hprime_from_chain(h: &OperatorMatrix, bond_constant: f64) -> Result<OperatorMatrix> {
    let l = h.sites();
    let shift = OperatorMatrix::identity(l)?.scaled(C64::new((l - 1) as f64 * bond_constant, 0.0));
    Ok(&h.scaled(C64::new(4.0, 0.0)) - &shift)
}

/// 2×2 matrix attached to a two-qubit state:
/// `[[⟨ψ|01⟩, ⟨ψ|11⟩], [−⟨ψ|00⟩, −⟨ψ|10⟩]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TMatrix {
    pub entries: [[C64; 2]; 2],
    pub source_state: TwoQubitState,
}

impl TMatrix {
    pub fn det(&self) -> C64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn eigenvalues(&self) -> [C64; 2] {
        let half = self.trace() / 2.0;
        let disc = (half * half - self.det()).sqrt();
        [half + disc, half - disc]
    }

    pub fn inverse(&self) -> Option<[[C64; 2]; 2]> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let m = &self.entries;
        Some([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
    }

    /// `(T†)^{-1}`.
    pub fn inverse_adjoint(&self) -> Option<[[C64; 2]; 2]> {
        let inv = self.inverse()?;
        Some([[inv[0][0].conj(), inv[1][0].conj()], [inv[0][1].conj(), inv[1][1].conj()]])
    }
}

pub fn t_matrix(psi: &TwoQubitState) -> TMatrix {
    let norm: f64 = psi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        log::warn!("t_matrix: input state has norm {norm}, not 1");
    }
    TMatrix {
        entries: [[psi[1].conj(), psi[3].conj()], [-psi[0].conj(), -psi[2].conj()]],
        source_state: *psi,
    }
}

fn entangled_t(psi: &TwoQubitState) -> Result<TMatrix> {
    let t = t_matrix(psi);
    let det = t.det().norm();
    if det <= 1e-12 {
        return Err(Error::ProductState { det });
    }
    Ok(t)
}

/// Gap rule for rank-one chains: gapped iff the eigenvalues of `T_ψ` have
/// different moduli (relative tolerance 1e-9).
pub fn rank1_gap_criterion(psi: &TwoQubitState) -> Result<bool> {
    let t = entangled_t(psi)?;
    let [l1, l2] = t.eigenvalues();
    let (m1, m2) = (l1.norm(), l2.norm());
    Ok((m1 - m2).abs() > 1e-9 * m1.max(m2))
}

/// `‖ψ − det(T_ψ)* (1 ⊗ T_ψ^{−†}) ξ‖` with `ξ = |01⟩ − |10⟩`.
pub fn singlet_identity_check(psi: &TwoQubitState) -> Result<f64> {
    let t = entangled_t(psi)?;
    let m = t
        .inverse_adjoint()
        .ok_or(Error::ProductState { det: 0.0 })?;
    let scale = t.det().conj();
    // (1 ⊗ M)(|0⟩|1⟩ − |1⟩|0⟩) = |0⟩ M|1⟩ − |1⟩ M|0⟩
    let rebuilt = [
        scale * m[0][1],
        scale * m[1][1],
        -scale * m[0][0],
        -scale * m[1][0],
    ];
    Ok(psi
        .iter()
        .zip(&rebuilt)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// True iff the two-site term commutes with `Z⊗Z` within 1e-12.
pub fn parity_sector_check(dimer: &OperatorMatrix) -> Result<bool> {
    if dimer.sites() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected a 4x4 two-site term, got {} sites",
            dimer.sites()
        )));
    }
    let zz = crate::hilbert::parity_operator(2)?;
    Ok(commutator_norm(dimer, &zz)? <= 1e-12)
}

/// Ascending eigenvalues of a small Hermitian operator.
#[cfg(test)]
pub(crate) fn hermitian_eigenvalues(op: &OperatorMatrix) -> Result<Vec<f64>> {
    op.mat()
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))
}
