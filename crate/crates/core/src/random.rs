//! Seeded random sheaves: two-term complexes of indicators.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::field::Field;
use crate::geometry::FacePoset;
use crate::matrix::Matrix;
use crate::resolution::{Generator, IndicatorComplex, Kind};
use crate::sheaf::Sheaf;

/// Random two-term complex `⊕ 1_t → ⊕ 1_s` in degrees `-1, 0` (or the
/// injective analogue), with at most `max_gens` generators in each degree.
pub fn random_indicator_complex(base: &Arc<FacePoset>, field: Field, max_gens: usize, rng: &mut ChaCha8Rng) -> IndicatorComplex {
    let n = base.len();
    let kind = if rng.gen_bool(0.3) { Kind::Injective } else { Kind::Projective };
    let top = rng.gen_range(1..=max_gens.max(1));
    let bottom = rng.gen_range(0..=max_gens);
    let mut gens: Vec<Generator> = Vec::new();
    for _ in 0..bottom {
        gens.push(Generator { label: rng.gen_range(0..n), degree: -1 });
    }
    for _ in 0..top {
        gens.push(Generator { label: rng.gen_range(0..n), degree: 0 });
    }
    let mut trip = Vec::new();
    for g in 0..bottom {
        for h in bottom..gens.len() {
            if base.le(gens[g].label, gens[h].label) && rng.gen_bool(0.7) {
                let v = rng.gen_range(-2i64..=2);
                if v != 0 {
                    trip.push((h, g, field.from_i64(v)));
                }
            }
        }
    }
    let m = gens.len();
    let d = Matrix::from_triplets(field, m, m, trip);
    IndicatorComplex::from_parts(base.clone(), field, kind, gens, d)
}

/// Random sheaf, possibly shifted by one.
pub fn random_sheaf(base: &Arc<FacePoset>, field: Field, max_gens: usize, rng: &mut ChaCha8Rng) -> Sheaf {
    let c = random_indicator_complex(base, field, max_gens, rng);
    let shift = rng.gen_range(0..=1);
    c.shift(shift).to_sheaf()
}
