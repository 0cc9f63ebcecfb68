//! Solutions and violations of every problem, as one tagged union.

use num::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{serde_rat_vec, RatVector};
use crate::bits::Bits;

/// Index sets of LCP certificates are 0-based; slice dimensions `i` are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    /// End of the line: `P(S(x)) != x`.
    U1 { x: Bits },
    /// Non-increasing potential on an edge.
    UV1 { x: Bits },
    /// Start of a second line: `S(P(x)) != x != 0`.
    UV2 { x: Bits },
    /// Two vertices on different lines.
    UV3 { x: Bits, y: Bits },
    R1 { x: Bits },
    R2 { x: Bits },
    T1 { x: Bits },
    T2 { x: Bits },
    T3 { x: Bits },
    UF1 { x: Bits },
    UFV1 { x: Bits, y: Bits },
    UFP1 { x: Bits },
    UFPV1 { x: Bits, y: Bits },
    S1 { x: Bits },

    O1 {
        #[serde(with = "serde_point")]
        p: Vec<BigUint>,
    },
    OV1 {
        i: usize,
        #[serde(with = "serde_point")]
        p: Vec<BigUint>,
        #[serde(with = "serde_point")]
        q: Vec<BigUint>,
    },
    OV2 {
        i: usize,
        #[serde(with = "serde_point")]
        p: Vec<BigUint>,
        #[serde(with = "serde_point")]
        q: Vec<BigUint>,
    },
    OV3 {
        i: usize,
        #[serde(with = "serde_point")]
        p: Vec<BigUint>,
    },

    US1 { v: Bits },
    USV1 { v: Bits },
    USV2 { v: Bits, u: Bits },

    Q1 {
        #[serde(with = "serde_rat_vec")]
        y: RatVector,
    },
    PV1 { alpha: Vec<usize> },
    PV2 {
        #[serde(with = "serde_rat_vec")]
        x: RatVector,
    },
    PV3 { alpha: Vec<usize>, beta: Vec<usize> },
    /// A Lemke ray that is not the primary ray, from vertex `(y, z)` along `(dy, dz)`.
    SecondaryRay {
        #[serde(with = "serde_rat_vec")]
        y: RatVector,
        #[serde(with = "crate::arith::serde_rat")]
        z: crate::arith::Rational,
        #[serde(with = "serde_rat_vec")]
        dy: RatVector,
        #[serde(with = "crate::arith::serde_rat")]
        dz: crate::arith::Rational,
    },

    CM1 {
        #[serde(with = "serde_rat_vec")]
        x: RatVector,
    },
    CMV1 {
        #[serde(with = "serde_rat_vec")]
        x: RatVector,
        #[serde(with = "serde_rat_vec")]
        y: RatVector,
    },
    CMV2 {
        #[serde(with = "serde_rat_vec")]
        x: RatVector,
    },
    CMV3 {
        i: usize,
        #[serde(with = "serde_rat_vec")]
        x: RatVector,
        #[serde(with = "serde_rat_vec")]
        y: RatVector,
    },
    /// A point with `||f(x) - x||_p <= eps`.
    ApproxFix {
        #[serde(with = "serde_rat_vec")]
        x: RatVector,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Line,
    Opdc,
    Uso,
    Lcp,
    Contraction,
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        use Certificate::*;
        match self {
            U1 { .. } => "U1",
            UV1 { .. } => "UV1",
            UV2 { .. } => "UV2",
            UV3 { .. } => "UV3",
            R1 { .. } => "R1",
            R2 { .. } => "R2",
            T1 { .. } => "T1",
            T2 { .. } => "T2",
            T3 { .. } => "T3",
            UF1 { .. } => "UF1",
            UFV1 { .. } => "UFV1",
            UFP1 { .. } => "UFP1",
            UFPV1 { .. } => "UFPV1",
            S1 { .. } => "S1",
            O1 { .. } => "O1",
            OV1 { .. } => "OV1",
            OV2 { .. } => "OV2",
            OV3 { .. } => "OV3",
            US1 { .. } => "US1",
            USV1 { .. } => "USV1",
            USV2 { .. } => "USV2",
            Q1 { .. } => "Q1",
            PV1 { .. } => "PV1",
            PV2 { .. } => "PV2",
            PV3 { .. } => "PV3",
            SecondaryRay { .. } => "SecondaryRay",
            CM1 { .. } => "CM1",
            CMV1 { .. } => "CMV1",
            CMV2 { .. } => "CMV2",
            CMV3 { .. } => "CMV3",
            ApproxFix { .. } => "ApproxFix",
        }
    }

    pub fn family(&self) -> Family {
        use Certificate::*;
        match self {
            U1 { .. } | UV1 { .. } | UV2 { .. } | UV3 { .. } | R1 { .. } | R2 { .. } | T1 { .. }
            | T2 { .. } | T3 { .. } | UF1 { .. } | UFV1 { .. } | UFP1 { .. } | UFPV1 { .. }
            | S1 { .. } => Family::Line,
            O1 { .. } | OV1 { .. } | OV2 { .. } | OV3 { .. } => Family::Opdc,
            US1 { .. } | USV1 { .. } | USV2 { .. } => Family::Uso,
            Q1 { .. } | PV1 { .. } | PV2 { .. } | PV3 { .. } | SecondaryRay { .. } => Family::Lcp,
            CM1 { .. } | CMV1 { .. } | CMV2 { .. } | CMV3 { .. } | ApproxFix { .. } => {
                Family::Contraction
            }
        }
    }

    /// Proper solutions, as opposed to violations of the promise.
    pub fn is_solution(&self) -> bool {
        use Certificate::*;
        matches!(
            self,
            U1 { .. }
                | R1 { .. }
                | T1 { .. }
                | UF1 { .. }
                | UFP1 { .. }
                | S1 { .. }
                | O1 { .. }
                | US1 { .. }
                | Q1 { .. }
                | CM1 { .. }
                | ApproxFix { .. }
        )
    }
}

pub mod serde_point {
    use super::*;

    pub fn serialize<S: Serializer>(p: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        p.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(|x| {
                let s = match x {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                s.parse::<BigUint>().map_err(serde::de::Error::custom)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::bits::b;

    #[test]
    fn json_tags() {
        let c = Certificate::UV3 { x: b("01"), y: b("10") };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"kind":"UV3","x":"01","y":"10"}"#);
        let q = Certificate::Q1 { y: vec![rat(1, 3), rat(1, 3)] };
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"kind":"Q1","y":["1/3","1/3"]}"#);
        assert_eq!(serde_json::from_str::<Certificate>(&s).unwrap(), q);
        let o = Certificate::OV2 { i: 1, p: vec![BigUint::from(1u32)], q: vec![BigUint::from(0u32)] };
        let s = serde_json::to_string(&o).unwrap();
        assert_eq!(serde_json::from_str::<Certificate>(&s).unwrap(), o);
    }
}
