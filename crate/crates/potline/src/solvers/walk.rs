//! Line following and sample-then-follow search.

use std::collections::BTreeMap;

use num::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::Bits;
use crate::error::PotlineError;
use crate::problems::{Certificate, Flavor, LineInstance};

/// Result of a walk along a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub cert: Certificate,
    pub steps: u64,
}

/// Default step budget: the size of the potential range, `2^m`.
pub fn default_max_steps(inst: &LineInstance) -> u64 {
    if inst.m() >= 63 {
        u64::MAX
    } else {
        1u64 << inst.m()
    }
}

/// Certificate for the edge `x -> S(x)`, or `None` when the walk may continue.
fn edge_certificate(inst: &LineInstance, x: &Bits, sx: &Bits) -> Option<Certificate> {
    let f = inst.flavor;
    let vx = || inst.v(x);
    match f {
        Flavor::EndOfLine => (sx == x || &inst.p(sx) != x).then(|| Certificate::R1 { x: x.clone() }),
        Flavor::Eopl => {
            if sx == x || &inst.p(sx) != x {
                Some(Certificate::R1 { x: x.clone() })
            } else if inst.v(sx) <= vx() {
                Some(Certificate::R2 { x: x.clone() })
            } else {
                None
            }
        }
        Flavor::Ueopl => {
            if sx == x || &inst.p(sx) != x {
                Some(Certificate::U1 { x: x.clone() })
            } else if inst.v(sx) <= vx() {
                Some(Certificate::UV1 { x: x.clone() })
            } else {
                None
            }
        }
        Flavor::Eoml => {
            if sx == x || &inst.p(sx) != x {
                Some(Certificate::T1 { x: x.clone() })
            } else if inst.v(sx) != vx() + 1u32 {
                Some(Certificate::T3 { x: x.clone() })
            } else {
                None
            }
        }
        Flavor::Ufeopl | Flavor::SinkOfDag | Flavor::UfeoplPlus1 => {
            if sx == x {
                return None;
            }
            let ssx = inst.s(sx);
            let vs = inst.v(sx);
            let end = &ssx == sx
                || match f {
                    Flavor::UfeoplPlus1 => vs != vx() + 1u32,
                    _ => vs <= vx(),
                };
            end.then(|| match f {
                Flavor::Ufeopl => Certificate::UF1 { x: x.clone() },
                Flavor::SinkOfDag => Certificate::S1 { x: x.clone() },
                _ => Certificate::UFP1 { x: x.clone() },
            })
        }
    }
}

/// Walks `x <- S(x)` from `start` until the first certificate, for at most `max_steps` moves.
pub fn follow_line(inst: &LineInstance, start: &Bits, max_steps: u64) -> Result<Walk, PotlineError> {
    follow_with(inst, start, max_steps, |_, _| None)
}

fn follow_with(
    inst: &LineInstance,
    start: &Bits,
    max_steps: u64,
    mut check: impl FnMut(&Bits, &Bits) -> Option<Certificate>,
) -> Result<Walk, PotlineError> {
    if start.len() != inst.n() {
        return Err(PotlineError::Dimension(format!("start {start} has width {}", start.len())));
    }
    if !inst.is_vertex(start) {
        return Err(PotlineError::UnmappableCert(format!("walk started at non-vertex {start}")));
    }
    let mut x = start.clone();
    let mut steps = 0u64;
    loop {
        let sx = inst.s(&x);
        if let Some(cert) = edge_certificate(inst, &x, &sx) {
            return Ok(Walk { cert, steps });
        }
        if sx == x {
            return Err(PotlineError::UnmappableCert(format!("walk stopped at self-loop {x}")));
        }
        if let Some(cert) = check(&x, &sx) {
            return Ok(Walk { cert, steps });
        }
        if steps >= max_steps {
            return Err(PotlineError::Exhausted(max_steps));
        }
        x = sx;
        steps += 1;
    }
}

/// Samples `samples` strings, walks from the best sampled vertex, and reports a `UV3`
/// when a sampled vertex witnesses a second line.
pub fn aldous(inst: &LineInstance, samples: u64, seed: u64, max_steps: u64) -> Result<Walk, PotlineError> {
    let n = inst.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drawn: Vec<Bits> = (0..samples).map(|_| Bits((0..n).map(|_| rng.gen::<bool>()).collect())).collect();
    let scored: Vec<(BigUint, Bits)> = drawn
        .into_par_iter()
        .filter(|x| inst.is_vertex(x))
        .map(|x| (inst.v(&x), x))
        .collect();
    let mut by_potential: BTreeMap<BigUint, Bits> = BTreeMap::new();
    for (v, x) in &scored {
        by_potential.entry(v.clone()).and_modify(|y| if x < y { *y = x.clone() }).or_insert_with(|| x.clone());
    }
    let start = match by_potential.iter().next_back() {
        Some((_, x)) => x.clone(),
        None => inst.zero(),
    };
    let check_uv3 = inst.flavor == Flavor::Ueopl;
    let between = |x: &Bits, sx: &Bits| {
        let vx = inst.v(x);
        let vs = inst.v(sx);
        by_potential
            .range(vx.clone()..vs)
            .find(|(v, y)| (*v != &vx || *y != x) && (*y != sx))
            .map(|(_, y)| Certificate::UV3 { x: x.clone(), y: y.clone() })
    };
    if check_uv3 {
        let hit = by_potential.values().find_map(|x| {
            let sx = inst.s(x);
            (sx != *x && inst.p(&sx) == *x).then(|| between(x, &sx)).flatten()
        });
        if let Some(cert) = hit {
            return Ok(Walk { cert, steps: 0 });
        }
    }
    follow_with(inst, &start, max_steps, |x, sx| {
        if check_uv3 {
            between(x, sx)
        } else {
            None
        }
    })
}

/// Convenience: `follow_line` from `0^n` with the default budget.
pub fn solve_line(inst: &LineInstance) -> Result<Walk, PotlineError> {
    follow_line(inst, &inst.zero(), default_max_steps(inst))
}
