//! Instance types, certificates and verifiers.

pub mod cert;
pub mod contraction;
pub mod lcp;
pub mod line;
pub mod opdc;
pub mod uso;
pub mod verify;

pub use cert::{Certificate, Family};
pub use contraction::{ContractionFile, ContractionInstance, ContractionMap};
pub use lcp::LcpInstance;
pub use line::{Flavor, LineFile, LineInstance, LineOracle, TableLine};
pub use opdc::{Dir, IntPoint, OpdcFile, OpdcInstance, OpdcOracle, TableOpdc};
pub use uso::{TableUso, UsoFile, UsoInstance, UsoOracle};
pub use verify::{
    explain_contraction, explain_lcp, explain_line, explain_opdc, explain_uso, verify_contraction, verify_lcp,
    verify_line, verify_opdc, verify_uso, Verdict,
};
