//! Small networks and codes shared by unit tests.

use crate::netmodel::MulticastNetwork;
use crate::scalarcode::ScalarCode;

/// Kernels 1, 1, 1+x^3, 1, 1+x^6 on the two-hop parallel network, L = 9.
pub fn fig1_mixed_code(net: &MulticastNetwork) -> ScalarCode {
    ScalarCode::from_terms(
        net,
        9,
        None,
        &[(1, 3, &[0]), (1, 4, &[0]), (2, 4, &[0, 3]), (3, 5, &[0]), (4, 6, &[0, 6])],
    )
    .unwrap()
}

/// Same network, the two weight-2 kernels replaced by x^6 and x^3.
pub fn fig1_monomial_code(net: &MulticastNetwork) -> ScalarCode {
    ScalarCode::from_terms(
        net,
        9,
        None,
        &[(1, 3, &[0]), (1, 4, &[0]), (2, 4, &[6]), (3, 5, &[0]), (4, 6, &[3])],
    )
    .unwrap()
}

/// s => v => t with receiver kernels `[[1, 1], [0, 1+x+x^2+x^4]]`.
pub fn two_hop_network() -> MulticastNetwork {
    MulticastNetwork::new(
        &["s", "v", "t"],
        "s",
        &["t"],
        &[(1, "s", "v"), (2, "s", "v"), (3, "v", "t"), (4, "v", "t")],
    )
    .unwrap()
}

pub fn two_hop_code(net: &MulticastNetwork) -> ScalarCode {
    ScalarCode::from_terms(
        net,
        7,
        None,
        &[(1, 3, &[0]), (1, 4, &[0]), (2, 4, &[0, 1, 2, 4])],
    )
    .unwrap()
}
