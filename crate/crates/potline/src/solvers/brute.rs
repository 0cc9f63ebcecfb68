//! Exhaustive enumeration of every certificate of small instances.

use std::collections::{BTreeMap, HashMap};

use num::{BigUint, Signed, Zero};

use crate::arith::{determinant, solve_linear, RatVector, Rational};
use crate::bits::Bits;
use crate::error::PotlineError;
use crate::problems::{
    verify_line, verify_opdc, verify_uso, Certificate, Dir, Flavor, IntPoint, LcpInstance, LineInstance,
    OpdcInstance, UsoInstance,
};
use crate::reductions::lcp::out_map;

/// Default enumeration cap when `POTLINE_BUDGET` is unset.
pub const DEFAULT_BUDGET: u64 = 1 << 16;

/// Enumeration cap from `POTLINE_BUDGET`, or [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> u64 {
    std::env::var("POTLINE_BUDGET").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

fn check_budget(size: &BigUint, budget: u64) -> Result<u64, PotlineError> {
    match u64::try_from(size) {
        Ok(s) if s <= budget => Ok(s),
        _ => Err(PotlineError::BudgetExceeded { size: size.to_string(), budget }),
    }
}

/// All subsets of `0..d` as sorted index lists, in binary-counter order.
pub fn subsets(d: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << d).map(move |mask| (0..d).filter(|i| mask >> i & 1 == 1).collect())
}

struct Row {
    x: Bits,
    v: BigUint,
    vs: BigUint,
    self_loop: bool,
    vertex: bool,
}

/// Every certificate of a line instance that passes `verify_line`.
pub fn brute_line(inst: &LineInstance, budget: u64) -> Result<Vec<Certificate>, PotlineError> {
    let n = inst.n();
    check_budget(&(BigUint::from(1u32) << n), budget)?;
    let f = inst.flavor;
    let rows: Vec<Row> = Bits::all(n)
        .map(|x| {
            let sx = inst.s(&x);
            let self_loop = sx == x;
            Row { v: inst.v(&x), vs: inst.v(&sx), vertex: inst.is_vertex(&x), self_loop, x }
        })
        .collect();
    use Certificate::*;
    let singles: Vec<fn(Bits) -> Certificate> = match f {
        Flavor::EndOfLine => vec![|x| R1 { x }],
        Flavor::Eopl => vec![|x| R1 { x }, |x| R2 { x }],
        Flavor::Ueopl => vec![|x| U1 { x }, |x| UV1 { x }, |x| UV2 { x }],
        Flavor::Eoml => vec![|x| T1 { x }, |x| T2 { x }, |x| T3 { x }],
        Flavor::Ufeopl => vec![|x| UF1 { x }],
        Flavor::UfeoplPlus1 => vec![|x| UFP1 { x }],
        Flavor::SinkOfDag => vec![|x| S1 { x }],
    };
    let mut out = Vec::new();
    for r in &rows {
        for mk in &singles {
            let c = mk(r.x.clone());
            if verify_line(inst, &c)? {
                out.push(c);
            }
        }
    }
    let pair: Option<fn(Bits, Bits) -> Certificate> = match f {
        Flavor::Ueopl => Some(|x, y| UV3 { x, y }),
        Flavor::Ufeopl => Some(|x, y| UFV1 { x, y }),
        Flavor::UfeoplPlus1 => Some(|x, y| UFPV1 { x, y }),
        _ => None,
    };
    if let Some(mk) = pair {
        let plus1 = f == Flavor::UfeoplPlus1;
        let mut by_v: BTreeMap<&BigUint, Vec<&Bits>> = BTreeMap::new();
        for r in &rows {
            let member = if plus1 { !r.self_loop } else { r.vertex };
            if member {
                by_v.entry(&r.v).or_default().push(&r.x);
            }
        }
        for r in &rows {
            let member = if plus1 { !r.self_loop } else { r.vertex };
            if !member {
                continue;
            }
            for y in by_v.get(&r.v).into_iter().flatten() {
                if &r.x < *y {
                    out.push(mk(r.x.clone(), (*y).clone()));
                }
            }
            if !plus1 && r.vs > r.v {
                let lo = &r.v + 1u32;
                for (_, ys) in by_v.range::<&BigUint, _>(&lo..&r.vs) {
                    for y in ys {
                        let c = mk(r.x.clone(), (*y).clone());
                        if verify_line(inst, &c)? {
                            out.push(c);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Every certificate of a grid instance that passes `verify_opdc`.
pub fn brute_opdc(inst: &OpdcInstance, budget: u64) -> Result<Vec<Certificate>, PotlineError> {
    check_budget(&inst.grid_size(), budget)?;
    let d = inst.d();
    let points = inst.points();
    let dirs: HashMap<IntPoint, Vec<Dir>> = points.iter().map(|p| (p.clone(), inst.dirs(p))).collect();
    let zero_through = |p: &IntPoint, i: usize| dirs[p][..i].iter().all(|&x| x == Dir::Zero);
    let mut out = Vec::new();
    for p in &points {
        if zero_through(p, d) {
            out.push(Certificate::O1 { p: p.clone() });
        }
    }
    for i in 1..=d {
        let k = i - 1;
        let mut slices: BTreeMap<&[BigUint], Vec<&IntPoint>> = BTreeMap::new();
        for p in &points {
            if !zero_through(p, k) {
                continue;
            }
            let di = dirs[p][k];
            if (p[k].is_zero() && di == Dir::Down) || (p[k] == inst.widths()[k] && di == Dir::Up) {
                out.push(Certificate::OV3 { i, p: p.clone() });
            }
            if di == Dir::Down && !p[k].is_zero() {
                let mut q = p.clone();
                q[k] -= 1u32;
                if zero_through(&q, k) && dirs[&q][k] == Dir::Up {
                    out.push(Certificate::OV2 { i, p: p.clone(), q });
                }
            }
            if di == Dir::Zero {
                slices.entry(&p[i..]).or_default().push(p);
            }
        }
        for group in slices.values() {
            for (a, p) in group.iter().enumerate() {
                for q in &group[a + 1..] {
                    out.push(Certificate::OV1 { i, p: (*p).clone(), q: (*q).clone() });
                }
            }
        }
    }
    debug_assert!(out.iter().all(|c| verify_opdc(inst, c).unwrap_or(false)));
    Ok(out)
}

/// Every certificate of a cube orientation that passes `verify_uso`.
pub fn brute_uso(inst: &UsoInstance, budget: u64) -> Result<Vec<Certificate>, PotlineError> {
    let n = inst.n();
    check_budget(&(BigUint::from(1u32) << n), budget)?;
    let table: Vec<(Bits, Option<Bits>)> = Bits::all(n).map(|v| (v.clone(), inst.orient(&v))).collect();
    let mut out = Vec::new();
    for (v, o) in &table {
        match o {
            None => out.push(Certificate::USV1 { v: v.clone() }),
            Some(o) if o.is_zero() => out.push(Certificate::US1 { v: v.clone() }),
            _ => {}
        }
    }
    for (a, (v, ov)) in table.iter().enumerate() {
        let Some(ov) = ov else { continue };
        for (u, ou) in &table[a + 1..] {
            let Some(ou) = ou else { continue };
            if v.xor(u).and(&ov.xor(ou)).is_zero() {
                out.push(Certificate::USV2 { v: v.clone(), u: u.clone() });
            }
        }
    }
    debug_assert!(out.iter().all(|c| verify_uso(inst, c).unwrap_or(false)));
    Ok(out)
}

/// All LCP solutions found by support enumeration over nonsingular principal blocks.
pub fn lcp_solutions(inst: &LcpInstance) -> Vec<RatVector> {
    let d = inst.d();
    let mut found: Vec<RatVector> = Vec::new();
    for alpha in subsets(d) {
        let mut y = vec![Rational::zero(); d];
        if !alpha.is_empty() {
            let mq: RatVector = alpha.iter().map(|&i| -inst.q[i].clone()).collect();
            let Ok(ya) = solve_linear(&inst.m.principal(&alpha), &mq) else { continue };
            for (&i, v) in alpha.iter().zip(ya) {
                y[i] = v;
            }
        }
        if inst.is_solution(&y) && !found.contains(&y) {
            found.push(y);
        }
    }
    found
}

/// True iff every principal minor of `m` is positive.
pub fn is_p_matrix(m: &crate::arith::RatMatrix) -> bool {
    subsets(m.rows()).skip(1).all(|a| determinant(&m.principal(&a)).is_positive())
}

/// Every `Q1`, `PV1` and `PV3` of an LCP. `PV2` vectors form a cone and are not enumerated.
pub fn brute_lcp(inst: &LcpInstance, budget: u64) -> Result<Vec<Certificate>, PotlineError> {
    let d = inst.d();
    check_budget(&(BigUint::from(1u32) << (2 * d)), budget)?;
    let mut out: Vec<Certificate> = lcp_solutions(inst).into_iter().map(|y| Certificate::Q1 { y }).collect();
    for alpha in subsets(d).skip(1) {
        if !determinant(&inst.m.principal(&alpha)).is_positive() {
            out.push(Certificate::PV1 { alpha });
        }
    }
    let outs: Vec<(Vec<usize>, Option<Bits>)> = subsets(d).map(|a| (a.clone(), out_map(inst, &a).result)).collect();
    for (a, (alpha, oa)) in outs.iter().enumerate() {
        let Some(oa) = oa else { continue };
        let ca = crate::reductions::lcp::chi(alpha, d);
        for (beta, ob) in &outs[a + 1..] {
            let Some(ob) = ob else { continue };
            let cb = crate::reductions::lcp::chi(beta, d);
            if ca.xor(&cb).and(&oa.xor(ob)).is_zero() {
                out.push(Certificate::PV3 { alpha: alpha.clone(), beta: beta.clone() });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, RatMatrix};
    use crate::bits::b;
    use crate::problems::opdc::{point, TableOpdc};
    use crate::problems::{verify_lcp, TableLine, TableUso};

    #[test]
    fn worked_lcp_has_one_solution() {
        let inst = LcpInstance::new(RatMatrix::from_ints(&[&[2, 1], &[1, 2]]), vec![int(-1), int(-1)]).unwrap();
        let certs = brute_lcp(&inst, 1 << 10).unwrap();
        assert_eq!(certs, vec![Certificate::Q1 { y: vec![rat(1, 3), rat(1, 3)] }]);
        assert!(is_p_matrix(&inst.m));
    }

    #[test]
    fn non_p_lcp_certificates_verify() {
        let inst = LcpInstance::new(RatMatrix::from_ints(&[&[0, 1], &[1, 0]]), vec![int(-1), int(-1)]).unwrap();
        let certs = brute_lcp(&inst, 1 << 10).unwrap();
        assert!(certs.iter().any(|c| matches!(c, Certificate::PV1 { .. })));
        for c in &certs {
            assert!(verify_lcp(&inst, c).unwrap(), "{c:?}");
        }
    }

    #[test]
    fn one_cube_sink() {
        let mut t = TableUso::new(1);
        t.orient.insert(b("0"), Some(b("1")));
        t.orient.insert(b("1"), Some(b("0")));
        let certs = brute_uso(&t.into_instance(), 16).unwrap();
        assert_eq!(certs, vec![Certificate::US1 { v: b("1") }]);
    }

    #[test]
    fn two_point_grid_ov2() {
        let mut t = TableOpdc::new(&[1]);
        t.set(&[0], &[Dir::Up]);
        t.set(&[1], &[Dir::Down]);
        let certs = brute_opdc(&t.into_instance(), 16).unwrap();
        assert_eq!(certs, vec![Certificate::OV2 { i: 1, p: point(&[1]), q: point(&[0]) }]);
    }

    #[test]
    fn line_totality() {
        let l = TableLine::from_path(3, &[(b("000"), 0), (b("011"), 2), (b("101"), 1)], true).into_instance(Flavor::Eopl);
        let certs = brute_line(&l, 64).unwrap();
        assert!(certs.contains(&Certificate::R2 { x: b("011") }));
        assert!(certs.contains(&Certificate::R1 { x: b("101") }));
    }

    #[test]
    fn budget_is_enforced() {
        let l = TableLine::new(10, true).into_instance(Flavor::Eopl);
        assert!(matches!(brute_line(&l, 100), Err(PotlineError::BudgetExceeded { .. })));
    }
}
