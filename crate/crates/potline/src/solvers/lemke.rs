//! Lemke's complementary pivoting on `w = My + q + z 1` with a lexicographic ratio test.

use std::cmp::Ordering;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{determinant, inverse, RatMatrix, RatVector, Rational};
use crate::problems::{Certificate, LcpInstance};

/// A variable of the covering system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    Y(usize),
    W(usize),
    Z,
}

impl Var {
    pub fn complement(self) -> Var {
        match self {
            Var::Y(i) => Var::W(i),
            Var::W(i) => Var::Y(i),
            Var::Z => Var::Z,
        }
    }

    pub fn label(self) -> Option<usize> {
        match self {
            Var::Y(i) | Var::W(i) => Some(i),
            Var::Z => None,
        }
    }
}

/// A basis of the system `w - My - z 1 = q` together with its inverse.
#[derive(Debug, Clone)]
pub struct Basis {
    pub vars: Vec<Var>,
    inv: RatMatrix,
    /// `B^-1 q`.
    pub values: RatVector,
}

/// A vertex of the covering polyhedron as explicit coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    pub y: RatVector,
    pub w: RatVector,
    pub z: Rational,
}

/// Result of moving along the edge opened by an entering variable.
#[derive(Debug, Clone)]
pub enum Step {
    Vertex { basis: Basis, leaving: Var },
    /// Unbounded edge; the direction has the entering variable at rate 1.
    Ray(Point),
}

/// The covering system of an LCP, shared by Lemke's algorithm and the line encoding.
#[derive(Debug, Clone)]
pub struct LemkeSystem {
    pub m: RatMatrix,
    pub q: RatVector,
}

impl LemkeSystem {
    pub fn new(inst: &LcpInstance) -> Self {
        LemkeSystem { m: inst.m.clone(), q: inst.q.clone() }
    }

    pub fn d(&self) -> usize {
        self.q.len()
    }

    pub fn column(&self, v: Var) -> RatVector {
        let d = self.d();
        match v {
            Var::W(i) => (0..d).map(|r| if r == i { Rational::one() } else { Rational::zero() }).collect(),
            Var::Y(j) => (0..d).map(|r| -self.m.get(r, j)).collect(),
            Var::Z => vec![-Rational::one(); d],
        }
    }

    /// Builds the basis for the given basic variables, or `None` if singular.
    pub fn basis(&self, vars: Vec<Var>) -> Option<Basis> {
        let cols: Vec<RatVector> = vars.iter().map(|&v| self.column(v)).collect();
        let inv = inverse(&RatMatrix::from_columns(&cols)).ok()?;
        let values = inv.mul_vec(&self.q);
        Some(Basis { vars, inv, values })
    }

    pub fn slack_basis(&self) -> Basis {
        self.basis((0..self.d()).map(Var::W).collect()).expect("identity basis")
    }

    /// Row `r` of `B^-1 [q | I]`, the perturbed value of the `r`-th basic variable.
    pub fn lex_row(&self, b: &Basis, r: usize) -> RatVector {
        let mut row = vec![b.values[r].clone()];
        row.extend(b.inv.row(r).iter().cloned());
        row
    }

    /// Every basic variable is lexicographically positive.
    pub fn lex_feasible(&self, b: &Basis) -> bool {
        (0..self.d()).all(|r| lex_cmp_zero(&self.lex_row(b, r)) == Ordering::Greater)
    }

    /// Perturbed value of `z` (zero when nonbasic).
    pub fn z_lex(&self, b: &Basis) -> RatVector {
        match b.vars.iter().position(|&v| v == Var::Z) {
            Some(r) => self.lex_row(b, r),
            None => vec![Rational::zero(); self.d() + 1],
        }
    }

    pub fn point(&self, b: &Basis) -> Point {
        let d = self.d();
        let mut p = Point { y: vec![Rational::zero(); d], w: vec![Rational::zero(); d], z: Rational::zero() };
        for (r, v) in b.vars.iter().enumerate() {
            let val = b.values[r].clone();
            match *v {
                Var::Y(i) => p.y[i] = val,
                Var::W(i) => p.w[i] = val,
                Var::Z => p.z = val,
            }
        }
        p
    }

    /// Edge direction when `entering` increases at unit rate.
    pub fn direction(&self, b: &Basis, entering: Var) -> Point {
        let a = b.inv.mul_vec(&self.column(entering));
        let d = self.d();
        let mut p = Point { y: vec![Rational::zero(); d], w: vec![Rational::zero(); d], z: Rational::zero() };
        let mut put = |v: Var, val: Rational| match v {
            Var::Y(i) => p.y[i] = val,
            Var::W(i) => p.w[i] = val,
            Var::Z => p.z = val,
        };
        put(entering, Rational::one());
        for (r, v) in b.vars.iter().enumerate() {
            put(*v, -a[r].clone());
        }
        p
    }

    /// Pivots `entering` into the basis using the lexicographic minimum ratio test.
    pub fn pivot(&self, b: &Basis, entering: Var) -> Step {
        let a = b.inv.mul_vec(&self.column(entering));
        let mut best: Option<(usize, RatVector)> = None;
        for r in 0..self.d() {
            if !a[r].is_positive() {
                continue;
            }
            let ratio: RatVector = self.lex_row(b, r).into_iter().map(|x| x / &a[r]).collect();
            if best.as_ref().is_none_or(|(_, cur)| lex_cmp(&ratio, cur) == Ordering::Less) {
                best = Some((r, ratio));
            }
        }
        match best {
            None => Step::Ray(self.direction(b, entering)),
            Some((r, _)) => {
                let mut vars = b.vars.clone();
                let leaving = vars[r];
                vars[r] = entering;
                let basis = self.basis(vars).expect("pivot keeps the basis nonsingular");
                Step::Vertex { basis, leaving }
            }
        }
    }

    /// The first vertex of the Lemke path: `z` enters and the lexicographically smallest row leaves.
    pub fn initial_basis(&self) -> Basis {
        let slack = self.slack_basis();
        let r = (0..self.d())
            .min_by(|&i, &j| lex_cmp(&self.lex_row(&slack, i), &self.lex_row(&slack, j)))
            .expect("d >= 1");
        let mut vars = slack.vars;
        vars[r] = Var::Z;
        self.basis(vars).expect("initial basis is nonsingular")
    }

    /// Label whose complementary pair is entirely nonbasic.
    pub fn duplicate_label(&self, b: &Basis) -> Option<usize> {
        (0..self.d()).find(|&i| !b.vars.contains(&Var::Y(i)) && !b.vars.contains(&Var::W(i)))
    }

    /// Local orientation sign: the determinant of the basis ordered by label, with `z` in the
    /// duplicate slot, times the product of the column types (`+1` for `y`, `-1` for `w`).
    pub fn orientation(&self, b: &Basis) -> i32 {
        let d = self.d();
        let dup = self.duplicate_label(b);
        let mut cols = Vec::with_capacity(d);
        let mut sign = 1i32;
        for i in 0..d {
            if Some(i) == dup {
                cols.push(self.column(Var::Z));
                continue;
            }
            let v = if b.vars.contains(&Var::Y(i)) { Var::Y(i) } else { Var::W(i) };
            if matches!(v, Var::W(_)) {
                sign = -sign;
            }
            cols.push(self.column(v));
        }
        let det = determinant(&RatMatrix::from_columns(&cols));
        if det.is_negative() {
            -sign
        } else {
            sign
        }
    }

    /// Orientation constant of the whole path, fixed by the start edge entering `y_r`.
    pub fn path_orientation(&self) -> i32 {
        if self.d() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// The entering variable of the forward edge at a vertex with a duplicate label.
    pub fn forward_entering(&self, b: &Basis) -> Option<Var> {
        let l = self.duplicate_label(b)?;
        Some(if self.orientation(b) * self.path_orientation() > 0 { Var::Y(l) } else { Var::W(l) })
    }

    /// Whether the edge opened by relaxing `z = 0` at a solution vertex points away from it.
    pub fn z_edge_outgoing(&self, b: &Basis) -> bool {
        self.orientation(b) == -self.path_orientation()
    }
}

fn lex_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn lex_cmp_zero(a: &[Rational]) -> Ordering {
    for x in a {
        if x.is_positive() {
            return Ordering::Greater;
        }
        if x.is_negative() {
            return Ordering::Less;
        }
    }
    Ordering::Equal
}

/// Lexicographic comparison of perturbed values.
pub fn lex_compare(a: &[Rational], b: &[Rational]) -> Ordering {
    lex_cmp(a, b)
}

/// Outcome of a Lemke run with its counters.
#[derive(Debug, Clone)]
pub struct LemkeRun {
    pub cert: Certificate,
    pub pivots: u64,
    /// Value of `z` at every visited vertex, starting with `z0`.
    pub z_trace: Vec<Rational>,
    /// Lexicographic value of `z` over `[q | I]` at every visited vertex.
    pub z_lex_trace: Vec<RatVector>,
}

/// Largest support searched for a non-positive principal minor.
pub const MINOR_SEARCH_CAP: usize = 16;

/// Searches the principal minors indexed by subsets of `support` for one that is not positive.
pub fn nonpositive_minor(m: &RatMatrix, support: &[usize]) -> Option<Vec<usize>> {
    if support.len() > MINOR_SEARCH_CAP {
        return None;
    }
    let k = support.len();
    let mut masks: Vec<u32> = (1u32..(1u32 << k)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks.into_iter().find_map(|mask| {
        let alpha: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| support[b]).collect();
        (!determinant(&m.principal(&alpha)).is_positive()).then_some(alpha)
    })
}

fn support(x: &[Rational]) -> Vec<usize> {
    (0..x.len()).filter(|&i| !x[i].is_zero()).collect()
}

/// Lemke's algorithm. Returns `Q1`, a `PV1` witness when the path misbehaves, or the ray itself.
pub fn lemke(inst: &LcpInstance) -> LemkeRun {
    let d = inst.d();
    if inst.q.iter().all(|x| !x.is_negative()) {
        return LemkeRun { cert: Certificate::Q1 { y: vec![Rational::zero(); d] }, pivots: 0, z_trace: vec![], z_lex_trace: vec![] };
    }
    let sys = LemkeSystem::new(inst);
    let mut basis = sys.initial_basis();
    let mut pivots = 1u64;
    let mut z_trace = vec![sys.point(&basis).z];
    let mut z_lex_trace = vec![sys.z_lex(&basis)];
    let mut entering = Var::Y(sys.duplicate_label(&basis).expect("initial vertex has a duplicate label"));
    loop {
        match sys.pivot(&basis, entering) {
            Step::Ray(dir) => {
                let at = sys.point(&basis);
                let cert = match nonpositive_minor(&inst.m, &support(&dir.y)) {
                    Some(alpha) => Certificate::PV1 { alpha },
                    None => Certificate::SecondaryRay { y: at.y, z: at.z, dy: dir.y, dz: dir.z },
                };
                return LemkeRun { cert, pivots, z_trace, z_lex_trace };
            }
            Step::Vertex { basis: next, leaving } => {
                pivots += 1;
                let p = sys.point(&next);
                let increased = z_trace.last().is_some_and(|z| &p.z > z);
                z_trace.push(p.z.clone());
                z_lex_trace.push(sys.z_lex(&next));
                if increased {
                    let mut idx: Vec<usize> =
                        next.vars.iter().chain(&basis.vars).filter_map(|v| matches!(v, Var::Y(_)).then(|| v.label().unwrap())).collect();
                    idx.sort_unstable();
                    idx.dedup();
                    if let Some(alpha) = nonpositive_minor(&inst.m, &idx) {
                        return LemkeRun { cert: Certificate::PV1 { alpha }, pivots, z_trace, z_lex_trace };
                    }
                }
                if leaving == Var::Z {
                    return LemkeRun { cert: Certificate::Q1 { y: p.y }, pivots, z_trace, z_lex_trace };
                }
                entering = leaving.complement();
                basis = next;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::problems::verify_lcp;

    fn lcp(m: &[&[i64]], q: &[i64]) -> LcpInstance {
        LcpInstance::new(RatMatrix::from_ints(m), q.iter().map(|&x| int(x)).collect()).unwrap()
    }

    #[test]
    fn trivial_q() {
        let r = lemke(&lcp(&[&[1, 0], &[0, 1]], &[1, 1]));
        assert_eq!(r.cert, Certificate::Q1 { y: vec![int(0), int(0)] });
    }

    #[test]
    fn worked_examples() {
        let i = lcp(&[&[2, 1], &[1, 2]], &[-1, -1]);
        let r = lemke(&i);
        assert_eq!(r.cert, Certificate::Q1 { y: vec![rat(1, 3), rat(1, 3)] });
        assert!(r.z_trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(r.z_lex_trace.windows(2).all(|w| lex_compare(&w[1], &w[0]).is_lt()));
        let i = lcp(&[&[1, 0], &[0, 1]], &[-1, -2]);
        assert_eq!(lemke(&i).cert, Certificate::Q1 { y: vec![int(1), int(2)] });
        assert!(verify_lcp(&i, &lemke(&i).cert).unwrap());
    }

    #[test]
    fn non_p_matrix_gives_violation() {
        let i = lcp(&[&[0, -1], &[1, 0]], &[-1, -1]);
        let r = lemke(&i);
        assert!(verify_lcp(&i, &r.cert).unwrap(), "{:?}", r.cert);
        let i = lcp(&[&[-1, 0], &[0, 1]], &[-1, -1]);
        let r = lemke(&i);
        assert!(verify_lcp(&i, &r.cert).unwrap(), "{:?}", r.cert);
    }

    #[test]
    fn orientation_of_initial_edge() {
        for q in [[-1i64, -2, -3], [-3, -1, -2], [-1, -1, -1]] {
            let i = lcp(&[&[3, 1, 0], &[1, 3, 1], &[0, 1, 3]], &q);
            let sys = LemkeSystem::new(&i);
            let b = sys.initial_basis();
            let l = sys.duplicate_label(&b).unwrap();
            assert_eq!(sys.forward_entering(&b), Some(Var::Y(l)));
        }
    }

    #[test]
    fn forward_edges_follow_the_path() {
        let i = lcp(&[&[3, 1, 0], &[1, 3, 1], &[0, 1, 3]], &[-1, -2, -1]);
        let sys = LemkeSystem::new(&i);
        let mut b = sys.initial_basis();
        let mut e = sys.forward_entering(&b).unwrap();
        for _ in 0..20 {
            match sys.pivot(&b, e) {
                Step::Vertex { basis, leaving } => {
                    if leaving == Var::Z {
                        assert!(!sys.z_edge_outgoing(&basis));
                        return;
                    }
                    assert_eq!(sys.forward_entering(&basis), Some(leaving.complement()));
                    b = basis;
                    e = leaving.complement();
                }
                Step::Ray(_) => panic!("ray on a P-matrix"),
            }
        }
        panic!("path too long");
    }
}
