//! Small relation matrices for the sandpile groups of polygon rings.
//!
//! When every polygon has at least one top and one bottom edge, the whole
//! sandpile group of a ring or twisted ring is generated by the three edge
//! classes `(f_1, e_1, g_1)` of the first polygon. Crossing polygon `i`
//! rewrites the classes linearly:
//!
//! ```text
//! f_i = f_{i-1} + e_{i-1}
//! e_i = a_i*f_{i-1} + (a_i + b_i + 1)*e_{i-1} + b_i*g_{i-1}
//! g_i = e_{i-1} + g_{i-1}
//! ```
//!
//! i.e. `(f_i, e_i, g_i)^t = A_i (f_{i-1}, e_{i-1}, g_{i-1})^t` with the 3x3
//! transfer matrix built by [`transfer_matrix`]. The three relations left
//! over after this rewriting (the first polygon's cycle, the full top cycle
//! and one vertex cut) give a 3x3 relation matrix for the group: its Smith
//! normal form has the invariant factors of the sandpile group and its
//! absolute determinant is the spanning-tree count.
//!
//! For uniform rings the entries collapse to closed forms in the `tau`/`rho`
//! sequences; those printed matrices are built by [`uniform_relation_matrix`]
//! and are unimodularly equivalent to the general ones.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::graph::{PolygonSpec, Topology};
use crate::matrix::IntegerMatrix;
use crate::sequences::{exact_div, SequenceParams, SequenceTable};
use crate::{int, Error, Result};

/// The 3x3 transfer matrix of one polygon with `top >= 1` upper edges and
/// `bottom >= 1` lower edges, rows and columns indexed `(f, e, g)`.
pub fn transfer_matrix(top: u64, bottom: u64) -> Result<IntegerMatrix> {
    if top == 0 || bottom == 0 {
        return Err(Error::unsupported(
            format!("transfer matrix needs both arcs positive, got ({top}, {bottom})"),
            "edge presentation",
        ));
    }
    let (a, b) = (int(top as i64), int(bottom as i64));
    Ok(IntegerMatrix::from_rows(vec![
        vec![BigInt::one(), BigInt::one(), BigInt::zero()],
        vec![a.clone(), &a + &b + BigInt::one(), b.clone()],
        vec![BigInt::zero(), BigInt::one(), BigInt::one()],
    ])
    .expect("fixed shape"))
}

/// Closed form of the n-th power of the uniform transfer matrix, assembled
/// from the `tau` sequence at `(a, b)`:
///
/// ```text
/// [ (b + a(tau_n - tau_{n-1})) / (a+b)    tau_n    (b(tau_n - tau_{n-1}) - b) / (a+b) ]
/// [ a*tau_n                        tau_{n+1}-tau_n                          b*tau_n   ]
/// [ (a(tau_n - tau_{n-1}) - a) / (a+b)    tau_n    (a + b(tau_n - tau_{n-1})) / (a+b) ]
/// ```
///
/// All divisions are exact; they are checked at runtime.
pub fn transfer_power_closed_form(n: usize, a: u64, b: u64) -> Result<IntegerMatrix> {
    if a == 0 || b == 0 {
        return Err(Error::unsupported(
            format!("closed-form power needs both arcs positive, got ({a}, {b})"),
            "repeated multiplication",
        ));
    }
    let p = SequenceParams::new(a, b);
    let arc = p.arc_sum();
    let m = n as i64;
    let tau_n = crate::sequences::tau(m, &p)?;
    let tau_prev = crate::sequences::tau(m - 1, &p)?;
    let tau_next = crate::sequences::tau(m + 1, &p)?;
    let step = &tau_n - &tau_prev;
    let (a, b) = (int(a as i64), int(b as i64));
    let ctx = "closed-form transfer power";
    Ok(IntegerMatrix::from_rows(vec![
        vec![
            exact_div(&(&b + &a * &step), &arc, ctx)?,
            tau_n.clone(),
            exact_div(&(&b * &step - &b), &arc, ctx)?,
        ],
        vec![&a * &tau_n, &tau_next - &tau_n, &b * &tau_n],
        vec![
            exact_div(&(&a * &step - &a), &arc, ctx)?,
            tau_n.clone(),
            exact_div(&(&a + &b * &step), &arc, ctx)?,
        ],
    ])
    .expect("fixed shape"))
}

/// The transfer data of a whole ring: per-polygon matrices, their cumulative
/// products, and the coefficients expressing the generators of the last
/// polygon (and the full top cycle) in terms of `(f_1, e_1, g_1)`.
#[derive(Clone, Debug)]
pub struct TransferChain {
    /// `A_2 .. A_n` in crossing order.
    pub step_matrices: Vec<IntegerMatrix>,
    /// `P_1 = I`, `P_i = A_i * P_{i-1}`; `(f_i, e_i, g_i)^t = P_i (f_1, e_1, g_1)^t`.
    pub prefix_products: Vec<IntegerMatrix>,
    /// `P_n`, the full coefficient matrix.
    pub coefficients: IntegerMatrix,
    /// The top cycle `a_1 f_1 + ... + a_n f_n` written as
    /// `c[0] f_1 + c[1] e_1 + c[2] g_1`.
    pub top_cycle: [BigInt; 3],
}

impl TransferChain {
    /// Requires `n >= 2` and every arc positive.
    pub fn build(spec: &PolygonSpec) -> Result<Self> {
        if spec.polygon_count() < 2 {
            return Err(Error::InvalidSpec(
                "transfer chain needs at least two polygons".into(),
            ));
        }
        if !spec.all_arcs_positive() {
            return Err(Error::unsupported(
                "transfer chain with a zero arc".to_string(),
                "edge presentation",
            ));
        }
        let n = spec.polygon_count();
        let mut step_matrices = Vec::with_capacity(n - 1);
        let mut prefix_products = vec![IntegerMatrix::identity(3)];
        for i in 2..=n {
            let a_i = transfer_matrix(spec.top_arcs()[i - 1], spec.bottom_arcs()[i - 1])?;
            let next = a_i.multiply(prefix_products.last().expect("nonempty"))?;
            step_matrices.push(a_i);
            prefix_products.push(next);
        }
        let mut top_cycle = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
        for (i, prefix) in prefix_products.iter().enumerate() {
            let weight = int(spec.top_arcs()[i] as i64);
            for (slot, c) in top_cycle.iter_mut().enumerate() {
                *c += &weight * prefix.at(0, slot);
            }
        }
        let coefficients = prefix_products.last().expect("nonempty").clone();
        Ok(TransferChain {
            step_matrices,
            prefix_products,
            coefficients,
            top_cycle,
        })
    }
}

/// 3x3 relation matrix for the sandpile group of a polygon ring whose arcs
/// are all positive, on the generators `(f_1, e_1, g_1)`.
pub fn relation_matrix_ring(spec: &PolygonSpec) -> Result<IntegerMatrix> {
    if spec.topology() != Topology::Ring {
        return Err(Error::InvalidSpec(format!(
            "ring relation matrix requested for a {}",
            spec.topology()
        )));
    }
    let chain = TransferChain::build(spec)?;
    let p = &chain.coefficients;
    let c = &chain.top_cycle;
    let a1 = int(spec.top_arcs()[0] as i64);
    let b1 = int(spec.bottom_arcs()[0] as i64);
    Ok(IntegerMatrix::from_rows(vec![
        vec![
            p.at(0, 0) - &a1 - BigInt::one(),
            p.at(0, 1) + BigInt::one(),
            p.at(0, 2) - &b1,
        ],
        vec![
            p.at(1, 0) + &a1,
            p.at(1, 1) - BigInt::one(),
            p.at(1, 2) + &b1,
        ],
        vec![c[0].clone(), c[1].clone(), c[2].clone()],
    ])
    .expect("fixed shape"))
}

/// 3x3 relation matrix for the sandpile group of a twisted polygon ring
/// whose arcs are all positive. The merged rung is reversed relative to the
/// ring, which negates the middle row of the coefficient matrix and shifts
/// the leftover relations accordingly.
pub fn relation_matrix_twisted(spec: &PolygonSpec) -> Result<IntegerMatrix> {
    if spec.topology() != Topology::Twisted {
        return Err(Error::InvalidSpec(format!(
            "twisted relation matrix requested for a {}",
            spec.topology()
        )));
    }
    let chain = TransferChain::build(spec)?;
    let p = &chain.coefficients;
    let c = &chain.top_cycle;
    let a1 = int(spec.top_arcs()[0] as i64);
    let b1 = int(spec.bottom_arcs()[0] as i64);
    Ok(IntegerMatrix::from_rows(vec![
        vec![
            p.at(2, 0) + &a1 + BigInt::one(),
            p.at(2, 1) - BigInt::one(),
            p.at(2, 2) + &b1,
        ],
        vec![
            p.at(1, 0) - &a1,
            p.at(1, 1) + BigInt::one(),
            p.at(1, 2) - &b1,
        ],
        vec![&c[0] - &a1, &c[1] + BigInt::one(), &c[2] - &b1],
    ])
    .expect("fixed shape"))
}

/// The printed relation matrices of the uniform families, with entries drawn
/// from the sequence kit:
///
/// * ring with `a >= 1`, `b = 0`: the 2x2 matrix on `(e_1, f_1)`,
/// * ring with `a, b >= 1`: a 3x3 matrix,
/// * twisted ring with `a, b >= 1`: a 3x3 matrix.
///
/// These are unimodularly equivalent to the matrices produced from
/// [`TransferChain`]; the test suite asserts equality of Smith normal forms
/// instead of reproducing the row reductions that connect them.
pub fn uniform_relation_matrix(
    n: usize,
    a: u64,
    b: u64,
    topology: Topology,
) -> Result<IntegerMatrix> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!(
            "uniform relation matrix needs n >= 2, got {n}"
        )));
    }
    let nn = n as i64;
    match (topology, a, b) {
        (Topology::Ring, a, 0) if a >= 1 => {
            let p = SequenceParams::new(a, 0);
            let tau_n = crate::sequences::tau(nn, &p)?;
            let tau_prev = crate::sequences::tau(nn - 1, &p)?;
            let head = &tau_n - &tau_prev - BigInt::one();
            let a = int(a as i64);
            Ok(IntegerMatrix::from_rows(vec![
                vec![head.clone(), tau_n],
                vec![&a * (&tau_prev + BigInt::one()), head],
            ])
            .expect("fixed shape"))
        }
        (Topology::Ring, a, b) if a >= 1 && b >= 1 => {
            let p = SequenceParams::new(a, b);
            let t = SequenceTable::build(p, nn)?;
            let arc = p.arc_sum();
            let (tau_n, tau_prev, rho_n) = (t.tau(nn), t.tau(nn - 1), t.rho(nn));
            let (a, b) = (int(a as i64), int(b as i64));
            let n_big = int(nn);
            let lift = &a * (tau_prev + BigInt::one());
            let ctx = "uniform ring relation matrix";
            Ok(IntegerMatrix::from_rows(vec![
                vec![&a * rho_n, tau_n.clone(), &b * rho_n],
                vec![
                    lift.clone(),
                    tau_n - tau_prev - BigInt::one(),
                    &b * (tau_prev + BigInt::one()),
                ],
                vec![
                    exact_div(&(&a * (&n_big * &b + &lift)), &arc, ctx)?,
                    &a * rho_n,
                    exact_div(&(&b * (&lift - &n_big * &a)), &arc, ctx)?,
                ],
            ])
            .expect("fixed shape"))
        }
        (Topology::Twisted, a, b) if a >= 1 && b >= 1 => {
            let p = SequenceParams::new(a, b);
            let t = SequenceTable::build(p, nn)?;
            let arc = p.arc_sum();
            let (tau_n, tau_prev, rho_n) = (t.tau(nn), t.tau(nn - 1), t.rho(nn));
            let (a, b) = (int(a as i64), int(b as i64));
            let n_big = int(nn);
            let ctx = "uniform twisted relation matrix";
            Ok(IntegerMatrix::from_rows(vec![
                vec![
                    &a * rho_n + BigInt::one(),
                    tau_n.clone(),
                    &b * rho_n + BigInt::one(),
                ],
                vec![
                    &a * (tau_prev - BigInt::one()),
                    tau_n - tau_prev + BigInt::one(),
                    &b * (tau_prev - BigInt::one()),
                ],
                vec![
                    exact_div(&(&a * (&n_big * &b + &a - &b * tau_prev)), &arc, ctx)?,
                    -(&b * rho_n) - BigInt::one(),
                    exact_div(&(&b * (&a - &n_big * &a - &b * tau_prev)), &arc, ctx)?,
                ],
            ])
            .expect("fixed shape"))
        }
        _ => Err(Error::unsupported(
            format!("uniform relation matrix for {topology} with (a, b) = ({a}, {b})"),
            "general relation matrix or edge presentation",
        )),
    }
}
