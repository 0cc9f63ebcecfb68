//! Exact verifiers for every certificate kind.

use std::cmp::Ordering;

use num::{BigInt, BigUint, One, Signed, Zero};

use super::cert::Certificate;
use super::contraction::{in_box, ContractionInstance};
use super::lcp::LcpInstance;
use super::line::{Flavor, LineInstance};
use super::opdc::{Dir, OpdcInstance};
use super::uso::UsoInstance;
use crate::arith::{determinant, lp_power, lp_scaled_compare, sub_vec, Rational};
use crate::bits::Bits;
use crate::error::PotlineError;

/// Outcome of a verification: accepted, or the clause that failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(String),
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        matches!(self, Verdict::Accept)
    }

    fn from_bool(ok: bool, why: impl FnOnce() -> String) -> Self {
        if ok {
            Verdict::Accept
        } else {
            Verdict::Reject(why())
        }
    }
}

fn mismatch(cert: &Certificate, instance: impl ToString) -> PotlineError {
    PotlineError::VariantMismatch { cert: cert.kind().to_string(), instance: instance.to_string() }
}

fn signed(v: BigUint) -> BigInt {
    BigInt::from(v)
}

fn check_width(inst: &LineInstance, xs: &[&Bits]) -> Result<(), PotlineError> {
    match xs.iter().find(|x| x.len() != inst.n()) {
        Some(x) => Err(PotlineError::Dimension(format!("{x} has width {} not {}", x.len(), inst.n()))),
        None => Ok(()),
    }
}

/// `S(P(x)) != x != 0^n or P(S(x)) != x`.
fn r1_holds(inst: &LineInstance, x: &Bits) -> bool {
    (!x.is_zero() && &inst.s(&inst.p(x)) != x) || &inst.p(&inst.s(x)) != x
}

fn second_line_holds(inst: &LineInstance, x: &Bits, y: &Bits) -> bool {
    if x == y || !inst.is_vertex(x) || !inst.is_vertex(y) {
        return false;
    }
    let (vx, vy) = (inst.v(x), inst.v(y));
    vx == vy || (vx < vy && vy < inst.v(&inst.s(x)))
}

pub fn explain_line(inst: &LineInstance, cert: &Certificate) -> Result<Verdict, PotlineError> {
    use Certificate::*;
    let f = inst.flavor;
    let allowed = match cert {
        R1 { .. } => matches!(f, Flavor::EndOfLine | Flavor::Eopl),
        R2 { .. } => f == Flavor::Eopl,
        U1 { .. } | UV1 { .. } | UV2 { .. } | UV3 { .. } => f == Flavor::Ueopl,
        T1 { .. } | T2 { .. } | T3 { .. } => f == Flavor::Eoml,
        UF1 { .. } | UFV1 { .. } => f == Flavor::Ufeopl,
        UFP1 { .. } | UFPV1 { .. } => f == Flavor::UfeoplPlus1,
        S1 { .. } => f == Flavor::SinkOfDag,
        _ => false,
    };
    if !allowed {
        return Err(mismatch(cert, f));
    }
    let v = match cert {
        R1 { x } | T1 { x } => {
            check_width(inst, &[x])?;
            Verdict::from_bool(r1_holds(inst, x), || format!("{x} is neither an end nor a start of a line"))
        }
        R2 { x } | UV1 { x } => {
            check_width(inst, &[x])?;
            let sx = inst.s(x);
            let ok = &sx != x && &inst.p(&sx) == x && inst.v(&sx) <= inst.v(x);
            Verdict::from_bool(ok, || format!("edge out of {x} is not a valid non-increasing edge"))
        }
        U1 { x } => {
            check_width(inst, &[x])?;
            let ok = inst.is_vertex(x) && &inst.p(&inst.s(x)) != x;
            Verdict::from_bool(ok, || format!("{x} is not a vertex or P(S({x})) = {x}"))
        }
        UV2 { x } => {
            check_width(inst, &[x])?;
            let ok = !x.is_zero() && &inst.s(&inst.p(x)) != x;
            Verdict::from_bool(ok, || format!("{x} is not the start of a second line"))
        }
        UV3 { x, y } | UFV1 { x, y } => {
            check_width(inst, &[x, y])?;
            Verdict::from_bool(second_line_holds(inst, x, y), || {
                format!("{x} and {y} are not vertices with V(x) = V(y) or V(x) < V(y) < V(S(x))")
            })
        }
        T2 { x } => {
            check_width(inst, &[x])?;
            let ok = !x.is_zero() && inst.v(x) == BigUint::one();
            Verdict::from_bool(ok, || format!("{x} is 0^n or V({x}) != 1"))
        }
        T3 { x } => {
            check_width(inst, &[x])?;
            let vx = signed(inst.v(x));
            let one = BigInt::one();
            let fwd = vx.is_positive() && signed(inst.v(&inst.s(x))) - &vx != one;
            let bwd = vx > one && &vx - signed(inst.v(&inst.p(x))) != one;
            Verdict::from_bool(fwd || bwd, || format!("potential steps around {x} are all exactly 1"))
        }
        UF1 { x } | S1 { x } => {
            check_width(inst, &[x])?;
            let sx = inst.s(x);
            let ok = &sx != x && (inst.s(&sx) == sx || inst.v(&sx) <= inst.v(x));
            Verdict::from_bool(ok, || format!("{x} is not the end of a line"))
        }
        UFP1 { x } => {
            check_width(inst, &[x])?;
            let sx = inst.s(x);
            let ok = &sx != x && (inst.s(&sx) == sx || inst.v(&sx) != inst.v(x) + 1u32);
            Verdict::from_bool(ok, || format!("{x} is not the end of a line"))
        }
        UFPV1 { x, y } => {
            check_width(inst, &[x, y])?;
            let ok = x != y && &inst.s(x) != x && &inst.s(y) != y && inst.v(x) == inst.v(y);
            Verdict::from_bool(ok, || format!("{x} and {y} are not distinct equal-potential vertices"))
        }
        _ => unreachable!(),
    };
    Ok(v)
}

pub fn verify_line(inst: &LineInstance, cert: &Certificate) -> Result<bool, PotlineError> {
    explain_line(inst, cert).map(|v| v.accepted())
}

fn same_slice(p: &[BigUint], q: &[BigUint], i: usize) -> bool {
    p[i..] == q[i..]
}

pub fn explain_opdc(inst: &OpdcInstance, cert: &Certificate) -> Result<Verdict, PotlineError> {
    use Certificate::*;
    let d = inst.d();
    let check_i = |i: usize| {
        if i >= 1 && i <= d {
            Ok(())
        } else {
            Err(PotlineError::Dimension(format!("slice dimension {i} not in 1..={d}")))
        }
    };
    let v = match cert {
        O1 { p } => {
            inst.check_grid(p)?;
            Verdict::from_bool(inst.zero_through(p, d), || "some D_i(p) is not zero".into())
        }
        OV1 { i, p, q } => {
            check_i(*i)?;
            inst.check_grid(p)?;
            inst.check_grid(q)?;
            if p == q {
                Verdict::Reject("p = q".into())
            } else if !same_slice(p, q, *i) {
                Verdict::Reject(format!("p and q are not in the same {i}-slice"))
            } else {
                let ok = inst.zero_through(p, *i) && inst.zero_through(q, *i);
                Verdict::from_bool(ok, || format!("p or q is not a fixpoint of its {i}-slice"))
            }
        }
        OV2 { i, p, q } => {
            check_i(*i)?;
            inst.check_grid(p)?;
            inst.check_grid(q)?;
            let k = i - 1;
            if !same_slice(p, q, *i) {
                Verdict::Reject(format!("p and q are not in the same {i}-slice"))
            } else if p[k] != &q[k] + 1u32 {
                Verdict::Reject(format!("p_{i} != q_{i} + 1"))
            } else if !(inst.zero_through(p, k) && inst.zero_through(q, k)) {
                Verdict::Reject(format!("D_j not zero for some j < {i}"))
            } else {
                let ok = inst.dir(*i, p) == Dir::Down && inst.dir(*i, q) == Dir::Up;
                Verdict::from_bool(ok, || format!("D_{i}(p) != down or D_{i}(q) != up"))
            }
        }
        OV3 { i, p } => {
            check_i(*i)?;
            inst.check_grid(p)?;
            let k = i - 1;
            if !inst.zero_through(p, k) {
                Verdict::Reject(format!("D_j(p) not zero for some j < {i}"))
            } else {
                let di = inst.dir(*i, p);
                let ok = (p[k].is_zero() && di == Dir::Down) || (p[k] == inst.widths()[k] && di == Dir::Up);
                Verdict::from_bool(ok, || format!("D_{i}(p) does not point off the grid"))
            }
        }
        _ => return Err(mismatch(cert, "opdc")),
    };
    Ok(v)
}

pub fn verify_opdc(inst: &OpdcInstance, cert: &Certificate) -> Result<bool, PotlineError> {
    explain_opdc(inst, cert).map(|v| v.accepted())
}

pub fn explain_uso(inst: &UsoInstance, cert: &Certificate) -> Result<Verdict, PotlineError> {
    use Certificate::*;
    let n = inst.n();
    let width = |v: &Bits| {
        if v.len() == n {
            Ok(())
        } else {
            Err(PotlineError::Dimension(format!("vertex {v} has width {}", v.len())))
        }
    };
    let v = match cert {
        US1 { v } => {
            width(v)?;
            Verdict::from_bool(inst.orient(v).is_some_and(|o| o.is_zero()), || format!("{v} is not a sink"))
        }
        USV1 { v } => {
            width(v)?;
            Verdict::from_bool(inst.orient(v).is_none(), || format!("outmap of {v} is defined"))
        }
        USV2 { v, u } => {
            width(v)?;
            width(u)?;
            let ok = v != u
                && match (inst.orient(v), inst.orient(u)) {
                    (Some(a), Some(b)) => v.xor(u).and(&a.xor(&b)).is_zero(),
                    _ => false,
                };
            Verdict::from_bool(ok, || format!("{v} and {u} satisfy the unique-sink condition"))
        }
        _ => return Err(mismatch(cert, "uso")),
    };
    Ok(v)
}

pub fn verify_uso(inst: &UsoInstance, cert: &Certificate) -> Result<bool, PotlineError> {
    explain_uso(inst, cert).map(|v| v.accepted())
}

fn check_index_set(alpha: &[usize], d: usize) -> Result<(), PotlineError> {
    let sorted = alpha.windows(2).all(|w| w[0] < w[1]);
    if !sorted || alpha.iter().any(|&i| i >= d) {
        return Err(PotlineError::Dimension(format!("index set {alpha:?} is not a sorted subset of 0..{d}")));
    }
    Ok(())
}

pub fn explain_lcp(inst: &LcpInstance, cert: &Certificate) -> Result<Verdict, PotlineError> {
    use Certificate::*;
    let d = inst.d();
    let dim = |v: &[Rational]| {
        if v.len() == d {
            Ok(())
        } else {
            Err(PotlineError::Dimension(format!("vector of length {} for d = {d}", v.len())))
        }
    };
    let v = match cert {
        Q1 { y } => {
            dim(y)?;
            match inst.solution_defect(y) {
                None => Verdict::Accept,
                Some(why) => Verdict::Reject(why),
            }
        }
        PV1 { alpha } => {
            check_index_set(alpha, d)?;
            let det = determinant(&inst.m.principal(alpha));
            Verdict::from_bool(!det.is_positive(), || format!("det M_aa = {det} > 0"))
        }
        PV2 { x } => {
            dim(x)?;
            if x.iter().all(|v| v.is_zero()) {
                Verdict::Reject("x = 0".into())
            } else {
                let mx = inst.m.mul_vec(x);
                match (0..d).find(|&i| (&x[i] * &mx[i]).is_positive()) {
                    None => Verdict::Accept,
                    Some(i) => Verdict::Reject(format!("x{0}(Mx){0} > 0", i + 1)),
                }
            }
        }
        PV3 { alpha, beta } => {
            check_index_set(alpha, d)?;
            check_index_set(beta, d)?;
            if alpha == beta {
                Verdict::Reject("alpha = beta".into())
            } else {
                let oa = crate::reductions::lcp::out_map(inst, alpha).result;
                let ob = crate::reductions::lcp::out_map(inst, beta).result;
                match (oa, ob) {
                    (Some(a), Some(b)) => {
                        let ca = crate::reductions::lcp::chi(alpha, d);
                        let cb = crate::reductions::lcp::chi(beta, d);
                        let ok = ca.xor(&cb).and(&a.xor(&b)).is_zero();
                        Verdict::from_bool(ok, || "out-maps distinguish alpha and beta".into())
                    }
                    _ => Verdict::Reject("an out-map is undefined".into()),
                }
            }
        }
        SecondaryRay { y, z, dy, dz } => {
            dim(y)?;
            dim(dy)?;
            Verdict::from_bool(is_secondary_ray(inst, y, z, dy, dz), || "not a complementary ray".into())
        }
        _ => return Err(mismatch(cert, "lcp")),
    };
    Ok(v)
}

/// A complementary ray `(y, z) + t (dy, dz)` of the covering system
/// `w = My + q + z 1`, other than the primary ray.
fn is_secondary_ray(inst: &LcpInstance, y: &[Rational], z: &Rational, dy: &[Rational], dz: &Rational) -> bool {
    let ones = vec![Rational::one(); inst.d()];
    let w: Vec<Rational> = inst.w(y).iter().zip(&ones).map(|(a, o)| a + z * o).collect();
    let dw: Vec<Rational> = inst.m.mul_vec(dy).iter().map(|a| a + dz).collect();
    let nonneg = |v: &[Rational]| v.iter().all(|x| !x.is_negative());
    if !(nonneg(y) && nonneg(&w) && nonneg(dy) && nonneg(&dw) && !z.is_negative() && !dz.is_negative()) {
        return false;
    }
    if dy.iter().all(|x| x.is_zero()) {
        return false;
    }
    (0..inst.d()).all(|i| {
        (&y[i] * &w[i]).is_zero()
            && (&y[i] * &dw[i]).is_zero()
            && (&dy[i] * &w[i]).is_zero()
            && (&dy[i] * &dw[i]).is_zero()
    })
}

pub fn verify_lcp(inst: &LcpInstance, cert: &Certificate) -> Result<bool, PotlineError> {
    explain_lcp(inst, cert).map(|v| v.accepted())
}

pub fn explain_contraction(inst: &ContractionInstance, cert: &Certificate) -> Result<Verdict, PotlineError> {
    use Certificate::*;
    let d = inst.d();
    let point = |x: &[Rational]| {
        if x.len() != d {
            Err(PotlineError::Dimension(format!("point of length {} for d = {d}", x.len())))
        } else if !in_box(x) {
            Err(PotlineError::OffGrid("point outside [0,1]^d".into()))
        } else {
            Ok(())
        }
    };
    let v = match cert {
        CM1 { x } => {
            point(x)?;
            Verdict::from_bool(inst.eval(x) == *x, || "f(x) != x".into())
        }
        CMV1 { x, y } => {
            point(x)?;
            point(y)?;
            let fx = inst.eval(x);
            let fy = inst.eval(y);
            let ord = lp_scaled_compare(&sub_vec(&fx, &fy), &inst.c, &sub_vec(x, y), inst.p);
            Verdict::from_bool(ord == Ordering::Greater, || "||f(x)-f(y)|| <= c||x-y||".into())
        }
        CMV2 { x } => {
            point(x)?;
            Verdict::from_bool(!in_box(&inst.eval(x)), || "f(x) lies in the box".into())
        }
        CMV3 { i, x, y } => {
            point(x)?;
            point(y)?;
            if *i < 1 || *i > d {
                return Err(PotlineError::Dimension(format!("slice dimension {i} not in 1..={d}")));
            }
            let kappa = crate::reductions::opdc::instance_kappa(inst)?;
            let k = Rational::from_integer(BigInt::one() << kappa[i - 1]);
            let c = i - 1;
            let fx = inst.eval(x);
            let fy = inst.eval(y);
            if x[*i..] != y[*i..] {
                Verdict::Reject(format!("x and y are not in the same {i}-slice"))
            } else if (0..c).any(|j| fx[j] != x[j] || fy[j] != y[j]) {
                Verdict::Reject(format!("(f - id)_j != 0 for some j < {i}"))
            } else if &k * &x[c] != &k * &y[c] + Rational::one() {
                Verdict::Reject(format!("k_{i} x_{i} != k_{i} y_{i} + 1"))
            } else {
                let ok = fx[c] < x[c] && fy[c] > y[c];
                Verdict::from_bool(ok, || format!("f(x)_{i} >= x_{i} or f(y)_{i} <= y_{i}"))
            }
        }
        ApproxFix { x } => {
            point(x)?;
            let eps = inst.eps.clone().ok_or_else(|| PotlineError::Parse("instance has no eps".into()))?;
            let r = lp_power(&inst.displacement(x), inst.p);
            let bound = num::pow(eps, inst.p as usize);
            Verdict::from_bool(r <= bound, || "||f(x)-x||_p > eps".into())
        }
        _ => return Err(mismatch(cert, "contraction")),
    };
    Ok(v)
}

pub fn verify_contraction(inst: &ContractionInstance, cert: &Certificate) -> Result<bool, PotlineError> {
    explain_contraction(inst, cert).map(|v| v.accepted())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, RatMatrix};
    use crate::bits::b;
    use crate::circuit::{Gate, LinearFixpCircuit};
    use crate::problems::line::TableLine;
    use crate::problems::opdc::{point, TableOpdc};
    use crate::problems::uso::TableUso;

    fn three_line() -> LineInstance {
        TableLine::from_path(2, &[(b("00"), 0), (b("01"), 1), (b("10"), 2)], true).into_instance(Flavor::Ueopl)
    }

    #[test]
    fn line_examples() {
        let l = three_line();
        assert!(verify_line(&l, &Certificate::U1 { x: b("10") }).unwrap());
        assert!(!verify_line(&l, &Certificate::UV1 { x: b("00") }).unwrap());
        assert!(!verify_line(&l, &Certificate::U1 { x: b("11") }).unwrap());
        assert!(verify_line(&l, &Certificate::R1 { x: b("10") }).is_err());
    }

    #[test]
    fn two_line_uv3() {
        let mut t = TableLine::from_path(2, &[(b("00"), 0), (b("01"), 1)], true);
        t.add_path(&[(b("10"), 1), (b("11"), 2)]);
        let l = t.into_instance(Flavor::Ueopl);
        assert!(verify_line(&l, &Certificate::UV3 { x: b("01"), y: b("10") }).unwrap());
        assert!(!verify_line(&l, &Certificate::UV3 { x: b("00"), y: b("11") }).unwrap());
        assert!(verify_line(&l, &Certificate::UV2 { x: b("10") }).unwrap());
    }

    #[test]
    fn opdc_examples() {
        let mut t = TableOpdc::new(&[2]);
        t.set(&[0], &[Dir::Up]);
        t.set(&[1], &[Dir::Zero]);
        t.set(&[2], &[Dir::Down]);
        let inst = t.into_instance();
        assert!(verify_opdc(&inst, &Certificate::O1 { p: point(&[1]) }).unwrap());
        assert!(!verify_opdc(&inst, &Certificate::O1 { p: point(&[2]) }).unwrap());
        assert!(verify_opdc(&inst, &Certificate::O1 { p: point(&[3]) }).is_err());

        let mut t = TableOpdc::new(&[1]);
        t.set(&[0], &[Dir::Up]);
        t.set(&[1], &[Dir::Down]);
        let inst = t.into_instance();
        assert!(verify_opdc(&inst, &Certificate::OV2 { i: 1, p: point(&[1]), q: point(&[0]) }).unwrap());

        let mut t = TableOpdc::new(&[1]);
        t.set(&[0], &[Dir::Down]);
        let inst = t.into_instance();
        assert!(verify_opdc(&inst, &Certificate::OV3 { i: 1, p: point(&[0]) }).unwrap());
    }

    #[test]
    fn uso_examples() {
        let mut t = TableUso::new(1);
        t.orient.insert(b("0"), Some(b("1")));
        t.orient.insert(b("1"), Some(b("0")));
        let u = t.into_instance();
        assert!(verify_uso(&u, &Certificate::US1 { v: b("1") }).unwrap());
        assert!(!verify_uso(&u, &Certificate::US1 { v: b("0") }).unwrap());

        let mut t = TableUso::new(2);
        t.orient.insert(b("00"), Some(b("00")));
        t.orient.insert(b("11"), Some(b("00")));
        let u = t.into_instance();
        assert!(verify_uso(&u, &Certificate::USV2 { v: b("00"), u: b("11") }).unwrap());
        assert!(verify_uso(&u, &Certificate::USV1 { v: b("01") }).unwrap());
    }

    #[test]
    fn lcp_examples() {
        let inst = LcpInstance::new(RatMatrix::from_ints(&[&[2, 1], &[1, 2]]), vec![int(-1), int(-1)]).unwrap();
        assert!(verify_lcp(&inst, &Certificate::Q1 { y: vec![rat(1, 3), rat(1, 3)] }).unwrap());
        let v = explain_lcp(&inst, &Certificate::Q1 { y: vec![rat(1, 3), rat(1, 2)] }).unwrap();
        assert!(matches!(v, Verdict::Reject(ref s) if s.contains("complementarity y2w2")));
        let z = LcpInstance::new(RatMatrix::from_ints(&[&[0, 1], &[1, 2]]), vec![int(-1), int(-1)]).unwrap();
        assert!(verify_lcp(&z, &Certificate::PV1 { alpha: vec![0] }).unwrap());
        let s = LcpInstance::new(RatMatrix::from_ints(&[&[0, -1], &[1, 0]]), vec![int(1), int(1)]).unwrap();
        assert!(verify_lcp(&s, &Certificate::PV2 { x: vec![int(1), int(0)] }).unwrap());
        assert!(!verify_lcp(&s, &Certificate::PV2 { x: vec![int(0), int(0)] }).unwrap());
    }

    #[test]
    fn contraction_examples() {
        let f = LinearFixpCircuit::new(
            1,
            vec![Gate::Input(0), Gate::Scale(rat(1, 2), 0), Gate::Const(rat(1, 4)), Gate::Add(1, 2)],
            vec![3],
        )
        .unwrap();
        let inst = ContractionInstance::circuit(f, rat(1, 2), 2).unwrap();
        assert!(verify_contraction(&inst, &Certificate::CM1 { x: vec![rat(1, 2)] }).unwrap());
        let id = ContractionInstance::circuit(LinearFixpCircuit::identity(1), rat(1, 2), 2).unwrap();
        assert!(verify_contraction(&id, &Certificate::CMV1 { x: vec![int(0)], y: vec![int(1)] }).unwrap());
        let shift = LinearFixpCircuit::new(1, vec![Gate::Input(0), Gate::Const(rat(1, 2)), Gate::Add(0, 1)], vec![2])
            .unwrap();
        let sh = ContractionInstance::circuit(shift, rat(1, 2), 1).unwrap();
        assert!(verify_contraction(&sh, &Certificate::CMV2 { x: vec![rat(3, 4)] }).unwrap());
        assert!(!verify_contraction(&sh, &Certificate::CMV2 { x: vec![rat(1, 4)] }).unwrap());
    }
}
