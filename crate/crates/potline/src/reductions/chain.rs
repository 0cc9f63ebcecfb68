//! Type-checked compositions of reductions with certificate map-back.

use std::fmt;
use std::str::FromStr;

use crate::error::PotlineError;
use crate::problems::{
    verify_contraction, verify_lcp, verify_line, verify_opdc, verify_uso, Certificate, ContractionInstance, Flavor,
    LcpInstance, LineInstance, OpdcInstance, UsoInstance,
};
use crate::reductions::lcp::{map_back_lcp, map_back_uso, plcp_to_eopl, plcp_to_uso};
use crate::reductions::line::{
    eoml_to_eopl, eopl_to_eoml, map_back_eoml_eopl, map_back_eopl_eoml, map_back_normalize, map_back_plus1_ueopl,
    map_back_ueopl_opdc, map_back_ufeopl_plus1, normalize_potentials, plus1_to_ueopl, ueopl_to_opdc, ufeopl_to_plus1,
};
use crate::reductions::opdc::{
    contraction_to_opdc, map_back_contraction, map_back_opdc, map_back_uso_opdc, opdc_to_ufeopl, uso_to_opdc,
};

/// Problem types that can appear in a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Plcp,
    Uso,
    Contraction,
    Opdc,
    Ufeopl,
    Plus1,
    Ueopl,
    Eopl,
    Eoml,
}

impl Node {
    pub fn flavor(self) -> Option<Flavor> {
        match self {
            Node::Ufeopl => Some(Flavor::Ufeopl),
            Node::Plus1 => Some(Flavor::UfeoplPlus1),
            Node::Ueopl => Some(Flavor::Ueopl),
            Node::Eopl => Some(Flavor::Eopl),
            Node::Eoml => Some(Flavor::Eoml),
            _ => None,
        }
    }

    pub fn of_flavor(f: Flavor) -> Option<Node> {
        match f {
            Flavor::Ufeopl => Some(Node::Ufeopl),
            Flavor::UfeoplPlus1 => Some(Node::Plus1),
            Flavor::Ueopl => Some(Node::Ueopl),
            Flavor::Eopl => Some(Node::Eopl),
            Flavor::Eoml => Some(Node::Eoml),
            _ => None,
        }
    }

    /// Whether a single reduction leads from `self` to `to`.
    pub fn reduces_to(self, to: Node) -> bool {
        use Node::*;
        matches!(
            (self, to),
            (Plcp, Uso)
                | (Plcp, Eopl)
                | (Plcp, Ueopl)
                | (Uso, Opdc)
                | (Contraction, Opdc)
                | (Opdc, Ufeopl)
                | (Ufeopl, Plus1)
                | (Plus1, Ueopl)
                | (Ueopl, Opdc)
                | (Eoml, Eopl)
                | (Eopl, Eoml)
        )
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Node::Plcp => "plcp",
            Node::Uso => "uso",
            Node::Contraction => "contraction",
            Node::Opdc => "opdc",
            Node::Ufeopl => "ufeopl",
            Node::Plus1 => "plus1",
            Node::Ueopl => "ueopl",
            Node::Eopl => "eopl",
            Node::Eoml => "eoml",
        };
        f.write_str(s)
    }
}

impl FromStr for Node {
    type Err = PotlineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "plcp" | "lcp" => Node::Plcp,
            "uso" => Node::Uso,
            "contraction" => Node::Contraction,
            "opdc" => Node::Opdc,
            "ufeopl" => Node::Ufeopl,
            "plus1" | "ufeoplplus1" => Node::Plus1,
            "ueopl" => Node::Ueopl,
            "eopl" => Node::Eopl,
            "eoml" => Node::Eoml,
            other => return Err(PotlineError::BadChain(format!("unknown problem {other:?}"))),
        })
    }
}

/// Parses `a:b:c` and checks that every step is a known reduction.
pub fn parse_chain(s: &str) -> Result<Vec<Node>, PotlineError> {
    let nodes = s.split(':').map(str::parse).collect::<Result<Vec<Node>, _>>()?;
    if nodes.len() < 2 {
        return Err(PotlineError::BadChain(format!("{s:?} needs at least two problems")));
    }
    for w in nodes.windows(2) {
        if !w[0].reduces_to(w[1]) {
            return Err(PotlineError::BadChain(format!("no reduction from {} to {}", w[0], w[1])));
        }
    }
    Ok(nodes)
}

/// An instance of any problem type.
#[derive(Debug, Clone)]
pub enum Instance {
    Lcp(LcpInstance),
    Uso(UsoInstance),
    Contraction(ContractionInstance),
    Opdc(OpdcInstance),
    Line(LineInstance),
}

impl Instance {
    pub fn node(&self) -> Option<Node> {
        match self {
            Instance::Lcp(_) => Some(Node::Plcp),
            Instance::Uso(_) => Some(Node::Uso),
            Instance::Contraction(_) => Some(Node::Contraction),
            Instance::Opdc(_) => Some(Node::Opdc),
            Instance::Line(l) => Node::of_flavor(l.flavor),
        }
    }

    pub fn verify(&self, cert: &Certificate) -> Result<bool, PotlineError> {
        match self {
            Instance::Lcp(i) => verify_lcp(i, cert),
            Instance::Uso(i) => verify_uso(i, cert),
            Instance::Contraction(i) => verify_contraction(i, cert),
            Instance::Opdc(i) => verify_opdc(i, cert),
            Instance::Line(i) => verify_line(i, cert),
        }
    }

    pub fn oracle_calls(&self) -> u64 {
        match self {
            Instance::Lcp(_) => 0,
            Instance::Uso(i) => i.oracle_calls(),
            Instance::Contraction(i) => i.oracle_calls(),
            Instance::Opdc(i) => i.oracle_calls(),
            Instance::Line(i) => i.oracle_calls(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edge {
    PlcpUso,
    PlcpLine(Flavor),
    UsoOpdc,
    ContractionOpdc,
    OpdcUfeopl,
    UfeoplPlus1,
    Plus1Ueopl,
    Normalize,
    UeoplOpdc,
    EomlEopl,
    EoplEoml,
}

/// Sources of every reduction step, in order, and the final target.
#[derive(Debug, Clone)]
pub struct Chain {
    steps: Vec<(Edge, Instance)>,
    target: Instance,
}

fn wrong(edge: Edge) -> PotlineError {
    PotlineError::BadChain(format!("instance type does not match step {edge:?}"))
}

fn apply(edge: Edge, src: &Instance) -> Result<Instance, PotlineError> {
    Ok(match (edge, src) {
        (Edge::PlcpUso, Instance::Lcp(l)) => Instance::Uso(plcp_to_uso(l)),
        (Edge::PlcpLine(f), Instance::Lcp(l)) => Instance::Line(plcp_to_eopl(l, f)?),
        (Edge::UsoOpdc, Instance::Uso(u)) => Instance::Opdc(uso_to_opdc(u)),
        (Edge::ContractionOpdc, Instance::Contraction(c)) => Instance::Opdc(contraction_to_opdc(c)?),
        (Edge::OpdcUfeopl, Instance::Opdc(o)) => Instance::Line(opdc_to_ufeopl(o)?),
        (Edge::UfeoplPlus1, Instance::Line(l)) => Instance::Line(ufeopl_to_plus1(l)?),
        (Edge::Plus1Ueopl, Instance::Line(l)) => Instance::Line(plus1_to_ueopl(l)?),
        (Edge::Normalize, Instance::Line(l)) => Instance::Line(normalize_potentials(l)?),
        (Edge::UeoplOpdc, Instance::Line(l)) => Instance::Opdc(ueopl_to_opdc(l)?),
        (Edge::EomlEopl, Instance::Line(l)) => Instance::Line(eoml_to_eopl(l)?),
        (Edge::EoplEoml, Instance::Line(l)) => Instance::Line(eopl_to_eoml(l)?),
        _ => return Err(wrong(edge)),
    })
}

fn back(edge: Edge, src: &Instance, cert: &Certificate) -> Result<Certificate, PotlineError> {
    match (edge, src) {
        (Edge::PlcpUso, Instance::Lcp(l)) => map_back_uso(l, cert),
        (Edge::PlcpLine(_), Instance::Lcp(l)) => map_back_lcp(l, cert),
        (Edge::UsoOpdc, Instance::Uso(u)) => map_back_uso_opdc(u, cert),
        (Edge::ContractionOpdc, Instance::Contraction(c)) => map_back_contraction(c, cert),
        (Edge::OpdcUfeopl, Instance::Opdc(o)) => map_back_opdc(o, cert),
        (Edge::UfeoplPlus1, Instance::Line(l)) => map_back_ufeopl_plus1(l, cert),
        (Edge::Plus1Ueopl, Instance::Line(l)) => map_back_plus1_ueopl(l, cert),
        (Edge::Normalize, Instance::Line(l)) => map_back_normalize(l, cert),
        (Edge::UeoplOpdc, Instance::Line(l)) => map_back_ueopl_opdc(l, cert),
        (Edge::EomlEopl, Instance::Line(l)) => map_back_eoml_eopl(l, cert),
        (Edge::EoplEoml, Instance::Line(l)) => map_back_eopl_eoml(l, cert),
        _ => Err(wrong(edge)),
    }
}

fn edges(from: Node, to: Node) -> Vec<Edge> {
    use Node::*;
    match (from, to) {
        (Plcp, Uso) => vec![Edge::PlcpUso],
        (Plcp, Eopl) => vec![Edge::PlcpLine(Flavor::Eopl)],
        (Plcp, Ueopl) => vec![Edge::PlcpLine(Flavor::Ueopl)],
        (Uso, Opdc) => vec![Edge::UsoOpdc],
        (Contraction, Opdc) => vec![Edge::ContractionOpdc],
        (Opdc, Ufeopl) => vec![Edge::OpdcUfeopl],
        (Ufeopl, Plus1) => vec![Edge::UfeoplPlus1],
        (Plus1, Ueopl) => vec![Edge::Plus1Ueopl],
        (Ueopl, Opdc) => vec![Edge::Normalize, Edge::UeoplOpdc],
        (Eoml, Eopl) => vec![Edge::EomlEopl],
        (Eopl, Eoml) => vec![Edge::EoplEoml],
        _ => vec![],
    }
}

impl Chain {
    /// Applies the reductions of `nodes` to `src`. A reduction that answers its source directly
    /// yields `TrivialInstance` carrying a certificate of `src`.
    pub fn build(nodes: &[Node], src: Instance) -> Result<Chain, PotlineError> {
        if nodes.first().copied() != src.node() {
            return Err(PotlineError::BadChain(format!(
                "chain starts at {} but the instance is {}",
                nodes.first().map_or("nothing".to_string(), Node::to_string),
                src.node().map_or("unsupported".to_string(), |n| n.to_string())
            )));
        }
        let mut chain = Chain { steps: Vec::new(), target: src };
        for w in nodes.windows(2) {
            if !w[0].reduces_to(w[1]) {
                return Err(PotlineError::BadChain(format!("no reduction from {} to {}", w[0], w[1])));
            }
            for edge in edges(w[0], w[1]) {
                let next = match apply(edge, &chain.target) {
                    Ok(i) => i,
                    Err(PotlineError::TrivialInstance(c)) => {
                        let mapped = chain.back_through(chain.steps.len(), &c)?;
                        return Err(PotlineError::TrivialInstance(Box::new(mapped)));
                    }
                    Err(e) => return Err(e),
                };
                let prev = std::mem::replace(&mut chain.target, next);
                chain.steps.push((edge, prev));
            }
        }
        Ok(chain)
    }

    pub fn source(&self) -> &Instance {
        self.steps.first().map_or(&self.target, |(_, s)| s)
    }

    pub fn target(&self) -> &Instance {
        &self.target
    }

    fn back_through(&self, upto: usize, cert: &Certificate) -> Result<Certificate, PotlineError> {
        let mut c = cert.clone();
        for (edge, src) in self.steps[..upto].iter().rev() {
            c = back(*edge, src, &c)?;
        }
        Ok(c)
    }

    /// Maps a certificate of the target back to a certificate of the source.
    pub fn map_back(&self, cert: &Certificate) -> Result<Certificate, PotlineError> {
        self.back_through(self.steps.len(), cert)
    }
}
