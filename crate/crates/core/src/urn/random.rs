//! Seeded generators for small models with rational weights.

use rand::Rng;

use super::model::UrnModel;
use crate::rational::{rat, Rational};

/// Rational `p/q` with `0 <= p <= max` and `1 <= q <= max`.
pub fn random_weight<R: Rng + ?Sized>(rng: &mut R, max: i64) -> Rational {
    rat(rng.gen_range(0..=max), rng.gen_range(1..=max))
}

fn random_row<R: Rng + ?Sized>(rng: &mut R, n: usize, max: i64) -> Vec<Rational> {
    loop {
        let row: Vec<Rational> = (0..n).map(|_| random_weight(rng, max)).collect();
        if row.iter().any(|g| *g > rat(0, 1)) {
            return row;
        }
    }
}

/// Model with independent random rows (or one shared row when `iid`).
/// Numerators and denominators are at most `max`.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, iid: bool, max: i64) -> UrnModel {
    let rows = if iid {
        vec![random_row(rng, n, max); m]
    } else {
        (0..m).map(|_| random_row(rng, n, max)).collect()
    };
    UrnModel::with_urns(rows, n).expect("rows have a positive entry")
}
