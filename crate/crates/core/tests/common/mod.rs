//! Exhaustive-enumeration oracles shared by the integration tests.
#![allow(dead_code)]

use kpzlab::point_process::{CylinderSpec, Point, PointConfig, Rect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Longest chain length and per-point maximality over `admissible`
/// (canonical order), by trying every subset.
pub fn brute_force(admissible: &[Point]) -> (usize, Vec<bool>) {
    let m = admissible.len();
    assert!(m <= 16);
    let mut best = 0;
    let mut union = 0u32;
    for mask in 0u32..(1 << m) {
        let size = mask.count_ones() as usize;
        if size < best {
            continue;
        }
        let mut prev: Option<&Point> = None;
        let mut ok = true;
        for (i, p) in admissible.iter().enumerate() {
            if mask & (1 << i) != 0 {
                if let Some(q) = prev {
                    if !q.precedes(p) {
                        ok = false;
                        break;
                    }
                }
                prev = Some(p);
            }
        }
        if !ok {
            continue;
        }
        if size > best {
            best = size;
            union = mask;
        } else {
            union |= mask;
        }
    }
    let flags = (0..m).map(|i| best > 0 && union & (1 << i) != 0).collect();
    (best, flags)
}

pub fn admissible(config: &PointConfig, w: Point, w_prime: Point) -> Vec<Point> {
    let rect = Rect::new(w, w_prime).unwrap();
    config
        .points()
        .iter()
        .copied()
        .filter(|p| rect.contains_open(p))
        .collect()
}

pub fn admissible_in(
    config: &PointConfig,
    cylinder: &CylinderSpec,
    w: Point,
    w_prime: Point,
) -> Vec<Point> {
    admissible(config, w, w_prime)
        .into_iter()
        .filter(|p| cylinder.contains(p))
        .collect()
}

/// Random configuration of at most 12 points on `[0, side]²`. About a third
/// of the coordinates are snapped to a quarter-unit lattice so that equal
/// `x` or equal `y` values occur often.
pub fn random_small_config(rng: &mut ChaCha8Rng, side: f64) -> PointConfig {
    let count = rng.random_range(0..=12);
    let mut coords: Vec<(f64, f64)> = Vec::with_capacity(count);
    let coord = |rng: &mut ChaCha8Rng| -> f64 {
        if rng.random_bool(0.35) {
            rng.random_range(1..(4.0 * side) as u32) as f64 / 4.0
        } else {
            rng.random::<f64>() * side
        }
    };
    while coords.len() < count {
        let c = (coord(rng), coord(rng));
        if !coords.contains(&c) {
            coords.push(c);
        }
    }
    PointConfig::from_coords(&coords, Rect::square(side).unwrap()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Compares the library against the oracle on one configuration; returns a
/// description of the first disagreement.
pub fn check_against_oracle(config: &PointConfig, cylinder: &CylinderSpec) -> Result<(), String> {
    use kpzlab::chains::{analyze_chains, longest_chain, longest_chain_restricted};
    let side = config.region().hi.x;
    let w = Point { x: 0.0, y: 0.0 };
    let w_prime = Point { x: side, y: side };

    let adm = admissible(config, w, w_prime);
    let (d, flags) = brute_force(&adm);
    let got = longest_chain(config, w, w_prime).map_err(|e| e.to_string())?;
    if got != d {
        return Err(format!("longest_chain {got} vs oracle {d}"));
    }
    let analysis = analyze_chains(config, w, w_prime).map_err(|e| e.to_string())?;
    if analysis.d != d || analysis.maximal != flags {
        return Err(format!(
            "flags {:?} (d {}) vs oracle {flags:?} (d {d})",
            analysis.maximal, analysis.d
        ));
    }

    let adm_k = admissible_in(config, cylinder, w, w_prime);
    let (dk, _) = brute_force(&adm_k);
    let got_k =
        longest_chain_restricted(config, cylinder, w, w_prime).map_err(|e| e.to_string())?;
    if got_k != dk {
        return Err(format!("restricted {got_k} vs oracle {dk}"));
    }
    Ok(())
}
