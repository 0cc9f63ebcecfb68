//! Nested binary search for exact and approximate fixpoints of contraction maps.

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{lp_power, simplest_between, RatVector, Rational};
use crate::error::PotlineError;
use crate::problems::contraction::in_box;
use crate::problems::{Certificate, ContractionInstance};

/// Per-dimension tolerances `eps_1..eps_d` used by the approximate search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsSchedule {
    pub p: u32,
    pub d: usize,
    #[serde(with = "crate::arith::serde_rat")]
    pub eps: Rational,
    #[serde(with = "crate::arith::serde_rat_vec")]
    pub values: RatVector,
}

impl EpsSchedule {
    pub fn new(eps: Rational, p: u32, d: usize) -> Self {
        assert!(p >= 1 && d >= 1, "p and d must be positive");
        let values = (1..=d).map(|i| eps_value(&eps, p, d, i)).collect();
        EpsSchedule { p, d, eps, values }
    }

    /// `eps_i` for `1 <= i <= d`.
    pub fn get(&self, i: usize) -> &Rational {
        &self.values[i - 1]
    }

    /// `sum_{i<k} p eps_i <= eps_k^p`.
    pub fn progress_holds(&self, k: usize) -> bool {
        let lhs: Rational = (1..k).map(|i| Rational::from_integer(BigInt::from(self.p)) * self.get(i)).sum();
        lhs <= num::pow(self.get(k).clone(), self.p as usize)
    }
}

fn eps_value(eps: &Rational, p: u32, d: usize, i: usize) -> Rational {
    let e = (d + 1 - i) as u32;
    if p == 1 {
        return eps / Rational::from_integer(BigInt::one() << (2 * e as usize));
    }
    let pe = num::pow(BigInt::from(p), e as usize);
    let pe = usize::try_from(pe).expect("exponent too large");
    let geo: usize = (0..=e).map(|j| (p as usize).pow(j)).sum();
    let dp = BigInt::from(d as u64 * p as u64);
    num::pow(eps.clone(), pe) / Rational::from_integer(num::pow(dp, 2 * geo))
}

/// Counters of a fixpoint search.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub evaluations: u64,
    pub slices: u64,
}

struct Search<'a> {
    inst: &'a ContractionInstance,
    stats: SearchStats,
}

impl Search<'_> {
    fn eval(&mut self, x: &[Rational]) -> Result<RatVector, Certificate> {
        self.stats.evaluations += 1;
        let fx = self.inst.eval(x);
        if in_box(&fx) {
            Ok(fx)
        } else {
            Err(Certificate::CMV2 { x: x.to_vec() })
        }
    }
}

fn with_coord(x: &[Rational], i: usize, t: Rational) -> RatVector {
    let mut y = x.to_vec();
    y[i] = t;
    y
}

/// Exact search over the grid with denominators `2^kappa_i`: `CM1`, `CMV2` or `CMV3`.
pub fn find_fp(inst: &ContractionInstance, kappa: &[u64]) -> Result<(Certificate, SearchStats), PotlineError> {
    let d = inst.d();
    if kappa.len() != d {
        return Err(PotlineError::Dimension(format!("{} grid exponents for d = {d}", kappa.len())));
    }
    let mut s = Search { inst, stats: SearchStats::default() };
    let start = vec![Rational::zero(); d];
    let cert = match exact_slice(&mut s, kappa, &start, d) {
        Ok(x) => Certificate::CM1 { x },
        Err(c) => c,
    };
    Ok((cert, s.stats))
}

/// Fixpoint of the `i`-slice through `base` (coordinates `1..=i` free).
fn exact_slice(s: &mut Search, kappa: &[u64], base: &[Rational], i: usize) -> Result<RatVector, Certificate> {
    s.stats.slices += 1;
    if i == 0 {
        return Ok(base.to_vec());
    }
    let c = i - 1;
    let grid = Rational::new(BigInt::one(), BigInt::one() << kappa[c] as usize);
    let bound = BigInt::one() << kappa[c] as usize;
    let probe = |s: &mut Search, t: &Rational| -> Result<(RatVector, Rational), Certificate> {
        let v = exact_slice(s, kappa, &with_coord(base, c, t.clone()), i - 1)?;
        let g = &s.eval(&v)?[c] - &v[c];
        Ok((v, g))
    };
    let (mut tl, mut th) = (Rational::zero(), Rational::one());
    let (mut vl, mut gl) = probe(s, &tl)?;
    if gl.is_zero() {
        return Ok(vl);
    }
    let (mut vh, mut gh) = probe(s, &th)?;
    if gh.is_zero() {
        return Ok(vh);
    }
    let mut last_secant: Option<Rational> = None;
    let two_grid = &grid * Rational::from_integer(BigInt::from(2));
    loop {
        let wide = &th - &tl > two_grid;
        let r = &tl + &gl * (&th - &tl) / (&gl - &gh);
        if r > tl && r < th && r.denom() <= &bound && last_secant.as_ref() != Some(&r) {
            let (v, g) = probe(s, &r)?;
            if g.is_zero() {
                return Ok(v);
            }
            last_secant = Some(r);
        }
        if !wide {
            break;
        }
        let mid = (&tl + &th) / Rational::from_integer(BigInt::from(2));
        let (v, g) = probe(s, &mid)?;
        if g.is_zero() {
            return Ok(v);
        }
        if g.is_positive() {
            (tl, vl, gl) = (mid, v, g);
        } else {
            (th, vh, gh) = (mid, v, g);
        }
    }
    let cand = simplest_between(&tl, &th);
    if cand.denom() <= &bound {
        let (v, g) = probe(s, &cand)?;
        if g.is_zero() {
            return Ok(v);
        }
    }
    if &th - &tl > grid {
        let mid = (&tl + &th) / Rational::from_integer(BigInt::from(2));
        let (v, g) = probe(s, &mid)?;
        if g.is_zero() {
            return Ok(v);
        }
        if g.is_positive() {
            vl = v;
        } else {
            vh = v;
        }
    }
    let _ = (gl, gh);
    Err(Certificate::CMV3 { i, x: vh, y: vl })
}

/// Approximate search: `ApproxFix`, or a pair violating contraction (`CMV1`), or `CMV2`.
pub fn approx_find_fp(inst: &ContractionInstance, sched: &EpsSchedule) -> Result<(Certificate, SearchStats), PotlineError> {
    let d = inst.d();
    if sched.d != d {
        return Err(PotlineError::Dimension(format!("schedule for d = {} used with d = {d}", sched.d)));
    }
    let mut s = Search { inst, stats: SearchStats::default() };
    let start = vec![Rational::zero(); d];
    let cert = match approx_slice(&mut s, sched, &start, d) {
        Ok(x) => Certificate::ApproxFix { x },
        Err(c) => c,
    };
    Ok((cert, s.stats))
}

fn approx_slice(s: &mut Search, sched: &EpsSchedule, base: &[Rational], i: usize) -> Result<RatVector, Certificate> {
    s.stats.slices += 1;
    if i == 0 {
        return Ok(base.to_vec());
    }
    let c = i - 1;
    let eps = sched.get(i).clone();
    let probe = |s: &mut Search, t: &Rational| -> Result<(RatVector, Rational), Certificate> {
        let v = approx_slice(s, sched, &with_coord(base, c, t.clone()), i - 1)?;
        let g = &s.eval(&v)?[c] - &v[c];
        Ok((v, g))
    };
    let (mut tl, mut th) = (Rational::zero(), Rational::one());
    let (mut vl, gl) = probe(s, &tl)?;
    if gl.abs() <= eps {
        return Ok(vl);
    }
    let (mut vh, gh) = probe(s, &th)?;
    if gh.abs() <= eps {
        return Ok(vh);
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    while &th - &tl > eps {
        let t = (&tl + &th) * &half;
        let (v, g) = probe(s, &t)?;
        if g.abs() <= eps {
            return Ok(v);
        }
        if g.is_positive() {
            (tl, vl) = (t, v);
        } else {
            (th, vh) = (t, v);
        }
    }
    let t = (&tl + &th) * &half;
    let (v, g) = probe(s, &t)?;
    if g.abs() > eps {
        return Err(if g.is_positive() { Certificate::CMV1 { x: v, y: vh } } else { Certificate::CMV1 { x: vl, y: v } });
    }
    Ok(v)
}

/// `||f(x) - x||_p^p`.
pub fn residual_power(inst: &ContractionInstance, x: &[Rational]) -> Rational {
    lp_power(&inst.displacement(x), inst.p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, RatMatrix};
    use crate::circuit::{Gate, LinearFixpCircuit};
    use crate::problems::verify_contraction;

    fn quarter_map() -> ContractionInstance {
        let f = LinearFixpCircuit::new(
            1,
            vec![Gate::Input(0), Gate::Scale(rat(1, 2), 0), Gate::Const(rat(1, 4)), Gate::Add(1, 2)],
            vec![3],
        )
        .unwrap();
        ContractionInstance::circuit(f, rat(1, 2), 2).unwrap()
    }

    #[test]
    fn exact_one_dimension() {
        let (c, _) = find_fp(&quarter_map(), &[8]).unwrap();
        assert_eq!(c, Certificate::CM1 { x: vec![rat(1, 2)] });
    }

    #[test]
    fn exact_two_dimensions_swap() {
        let a = RatMatrix::from_rows(vec![vec![int(0), rat(1, 2)], vec![rat(1, 2), int(0)]]).unwrap();
        let f = LinearFixpCircuit::affine(&a, &[rat(1, 4), rat(1, 4)]);
        let inst = ContractionInstance::circuit(f, rat(1, 2), 2).unwrap();
        let (c, _) = find_fp(&inst, &[16, 8]).unwrap();
        assert_eq!(c, Certificate::CM1 { x: vec![rat(1, 2), rat(1, 2)] });
    }

    #[test]
    fn exact_non_dyadic_fixpoint() {
        let a = RatMatrix::from_rows(vec![vec![rat(1, 3), rat(1, 5)], vec![rat(-1, 7), rat(2, 5)]]).unwrap();
        let b = vec![rat(1, 3), rat(2, 5)];
        let f = LinearFixpCircuit::affine(&a, &b);
        let inst = ContractionInstance::circuit(f.clone(), rat(3, 4), 1).unwrap();
        let (c, _) = find_fp(&inst, &[40, 20]).unwrap();
        match c {
            Certificate::CM1 { x } => assert_eq!(f.eval(&x), x),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flip_map_gives_cmv3() {
        let f = LinearFixpCircuit::new(1, vec![Gate::Input(0), Gate::Const(int(1)), Gate::Sub(1, 0)], vec![2]).unwrap();
        let inst = ContractionInstance::circuit(f, rat(1, 2), 1).unwrap().with_kappa(vec![3]);
        let (c, _) = find_fp(&inst, &[3]).unwrap();
        assert_eq!(c, Certificate::CM1 { x: vec![rat(1, 2)] });
        let f = LinearFixpCircuit::new(
            1,
            vec![Gate::Input(0), Gate::Const(int(1)), Gate::Scale(int(2), 0), Gate::Sub(1, 2), Gate::Const(int(0)), Gate::Max(3, 4)],
            vec![5],
        )
        .unwrap();
        let inst = ContractionInstance::circuit(f, rat(1, 2), 1).unwrap().with_kappa(vec![1]);
        let (c, _) = find_fp(&inst, &[1]).unwrap();
        assert!(matches!(c, Certificate::CMV3 { .. }), "{c:?}");
        assert!(verify_contraction(&inst, &c).unwrap());
    }

    #[test]
    fn approx_examples() {
        let half = LinearFixpCircuit::new(2, vec![Gate::Input(0), Gate::Input(1), Gate::Scale(rat(1, 2), 0), Gate::Scale(rat(1, 2), 1)], vec![2, 3]).unwrap();
        let eps = rat(1, 1024);
        let inst = ContractionInstance::circuit(half, rat(1, 2), 2).unwrap().with_eps(eps.clone());
        let (c, _) = approx_find_fp(&inst, &EpsSchedule::new(eps.clone(), 2, 2)).unwrap();
        assert!(verify_contraction(&inst, &c).unwrap(), "{c:?}");
        let q = quarter_map().with_eps(rat(1, 256));
        let mut q1 = q.clone();
        q1.p = 1;
        let (c, _) = approx_find_fp(&q1, &EpsSchedule::new(rat(1, 256), 1, 1)).unwrap();
        assert!(verify_contraction(&q1, &c).unwrap());
    }

    #[test]
    fn schedule_progress() {
        for p in 1..=3 {
            for d in 1..=4 {
                let s = EpsSchedule::new(rat(1, 1024), p, d);
                for k in 1..=d {
                    assert!(s.progress_holds(k), "p={p} d={d} k={k}");
                }
            }
        }
        assert_eq!(EpsSchedule::new(int(1), 1, 2).values, vec![rat(1, 16), rat(1, 4)]);
    }
}
