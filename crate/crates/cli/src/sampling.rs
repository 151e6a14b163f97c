//! Seeded random draws for the sampling commands. `ChaCha8Rng` keeps the
//! stream identical across platforms and releases of `rand`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::RangeInclusive;

use ffmzm::{FFModelSpec, ModelParams, Sublattice, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn angle(rng: &mut ChaCha8Rng, hi: f64) -> f64 {
    rng.gen_range(0.05..hi - 0.05)
}

fn coupling(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.2..3.0)
}

/// Open chain of a uniformly chosen family with random parameters.
pub fn random_spec(rng: &mut ChaCha8Rng, lengths: RangeInclusive<usize>) -> FFModelSpec {
    let sites = rng.gen_range(lengths);
    let params = match rng.gen_range(0..6) {
        0 => ModelParams::Rank1 { theta: angle(rng, FRAC_PI_2) },
        1 => ModelParams::Type1 { a: coupling(rng), b: coupling(rng), omega: angle(rng, PI) },
        2 => ModelParams::Type2 { a: coupling(rng), b: coupling(rng), gamma: angle(rng, PI) },
        3 => ModelParams::CaseII {
            a: coupling(rng),
            b: coupling(rng),
            omega: angle(rng, PI),
            sublattice: if rng.gen_bool(0.5) { Sublattice::Even } else { Sublattice::Odd },
        },
        4 => {
            let f = coupling(rng);
            ModelParams::CaseIII { a: coupling(rng), b: coupling(rng), f: if rng.gen_bool(0.5) { f } else { -f } }
        }
        _ => {
            let t = angle(rng, PI);
            let phi = rng.gen_range(0.0..2.0 * PI);
            ModelParams::Rank3 {
                psi: [C64::new((t / 2.0).cos(), 0.0), C64::from_polar((t / 2.0).sin(), phi)],
                eigs: [coupling(rng), coupling(rng), coupling(rng)],
            }
        }
    };
    FFModelSpec::open(sites, params).expect("sampled parameters lie inside their domains")
}

/// Complex number with real and imaginary parts uniform in `[-1, 1)`.
pub fn complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Normalized two-qubit state with `|det T| ≥ 1e-3`, by rejection.
pub fn entangled_state(rng: &mut ChaCha8Rng) -> [C64; 4] {
    loop {
        let mut psi: [C64; 4] = std::array::from_fn(|_| complex(rng));
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 0.1 {
            continue;
        }
        psi.iter_mut().for_each(|z| *z /= norm);
        if (psi[0] * psi[3] - psi[1] * psi[2]).norm() >= 1e-3 {
            return psi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<_> = (0..10).map({ let mut r = rng(7); move |_| random_spec(&mut r, 2..=6) }).collect();
        let b: Vec<_> = (0..10).map({ let mut r = rng(7); move |_| random_spec(&mut r, 2..=6) }).collect();
        assert_eq!(a, b);
    }
}
