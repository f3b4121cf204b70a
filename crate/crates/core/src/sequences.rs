//! The linear-recurrence sequences behind uniform polygon rings.
//!
//! For arc lengths `(a, b)` put `s = a + b + 2`. Four integer sequences all
//! satisfy `x_n = s*x_{n-1} - x_{n-2}` and differ only in initial values:
//!
//! * `tau`:   tau_{-1} = -1, tau_0 = 0
//! * `beta`:  beta_0 = 2,    beta_1 = s
//! * `gamma`: gamma_0 = -1,  gamma_1 = 1
//! * `delta`: delta_0 = 1,   delta_1 = s - 1
//!
//! `tau_n` counts the spanning trees of the uniform polygon chain with n-1
//! polygons of girth `s`. The closed form via the roots of `x^2 - s*x + 1`
//! is never evaluated numerically; everything comes from the recurrence, and
//! the quotient sequences (`rho`, `s_n` and the primed variants) are exact
//! integer divisions checked at runtime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::{int, Error, Result};

/// Arc-length parameters of a uniform family; `s = a + b + 2` is the shared
/// recurrence coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SequenceParams {
    pub a: u64,
    pub b: u64,
}

impl SequenceParams {
    pub fn new(a: u64, b: u64) -> Self {
        SequenceParams { a, b }
    }

    /// `a + b`, the denominator of every quotient sequence.
    pub fn arc_sum(&self) -> BigInt {
        BigInt::from(self.a + self.b)
    }

    /// The recurrence coefficient `s = a + b + 2`.
    pub fn coefficient(&self) -> BigInt {
        BigInt::from(self.a + self.b + 2)
    }
}

/// One pass/fail entry of [`check_identities`].
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub holds: bool,
}

/// Division that must be exact; a remainder means a broken invariant, not
/// bad input.
pub(crate) fn exact_div(numerator: &BigInt, denominator: &BigInt, context: &str) -> Result<BigInt> {
    if denominator.is_zero() {
        return Err(Error::Domain(format!(
            "{context}: division by zero (arc sum a+b must be positive)"
        )));
    }
    let (q, r) = numerator.div_rem(denominator);
    if !r.is_zero() {
        return Err(Error::InexactDivision {
            numerator: numerator.to_string(),
            denominator: denominator.to_string(),
            context: context.to_string(),
        });
    }
    Ok(q)
}

/// Values `x_0 ..= x_upto` of the shared recurrence with the given initial
/// values (`x_prev` is the value at index -1 for `tau`, at index 0 otherwise).
fn run(coefficient: &BigInt, first: BigInt, second: BigInt, upto: usize) -> Vec<BigInt> {
    let mut values = Vec::with_capacity(upto + 2);
    values.push(first);
    values.push(second);
    while values.len() <= upto {
        let n = values.len();
        let next = coefficient * &values[n - 1] - &values[n - 2];
        values.push(next);
    }
    values
}

/// `tau_{-1} ..= tau_{upto}` (index shifted by one: `v[i]` is `tau_{i-1}`).
fn tau_from_minus_one(p: &SequenceParams, upto: i64) -> Vec<BigInt> {
    run(
        &p.coefficient(),
        -BigInt::one(),
        BigInt::zero(),
        (upto + 1) as usize,
    )
}

fn beta_values(p: &SequenceParams, upto: usize) -> Vec<BigInt> {
    run(&p.coefficient(), int(2), p.coefficient(), upto)
}

fn gamma_values(p: &SequenceParams, upto: usize) -> Vec<BigInt> {
    run(&p.coefficient(), -BigInt::one(), BigInt::one(), upto)
}

fn delta_values(p: &SequenceParams, upto: usize) -> Vec<BigInt> {
    run(
        &p.coefficient(),
        BigInt::one(),
        p.coefficient() - BigInt::one(),
        upto,
    )
}

/// `tau_n` for `n >= -1`.
pub fn tau(n: i64, p: &SequenceParams) -> Result<BigInt> {
    if n < -1 {
        return Err(Error::Domain(format!(
            "tau is defined for n >= -1, got {n}"
        )));
    }
    Ok(tau_from_minus_one(p, n)[(n + 1) as usize].clone())
}

pub fn beta(n: i64, p: &SequenceParams) -> Result<BigInt> {
    if n < 0 {
        return Err(Error::Domain(format!(
            "beta is defined for n >= 0, got {n}"
        )));
    }
    Ok(beta_values(p, n as usize)[n as usize].clone())
}

pub fn gamma(n: i64, p: &SequenceParams) -> Result<BigInt> {
    if n < 0 {
        return Err(Error::Domain(format!(
            "gamma is defined for n >= 0, got {n}"
        )));
    }
    Ok(gamma_values(p, n as usize)[n as usize].clone())
}

pub fn delta(n: i64, p: &SequenceParams) -> Result<BigInt> {
    if n < 0 {
        return Err(Error::Domain(format!(
            "delta is defined for n >= 0, got {n}"
        )));
    }
    Ok(delta_values(p, n as usize)[n as usize].clone())
}

fn require_positive_arc_sum(p: &SequenceParams, what: &str) -> Result<()> {
    if p.a + p.b == 0 {
        return Err(Error::Domain(format!("{what} is undefined for a + b = 0")));
    }
    Ok(())
}

/// `rho_n = (tau_n - tau_{n-1} - 1) / (a + b)` for `n >= 1`.
pub fn rho(n: i64, p: &SequenceParams) -> Result<BigInt> {
    require_positive_arc_sum(p, "rho")?;
    if n < 1 {
        return Err(Error::Domain(format!("rho is defined for n >= 1, got {n}")));
    }
    let t = tau_from_minus_one(p, n);
    let num = &t[(n + 1) as usize] - &t[n as usize] - BigInt::one();
    exact_div(&num, &p.arc_sum(), "rho")
}

/// `s_n = (tau_{n+1} - tau_{n-1} - 2) / (a + b)` for `n >= 1`.
pub fn s_seq(n: i64, p: &SequenceParams) -> Result<BigInt> {
    require_positive_arc_sum(p, "s_n")?;
    if n < 1 {
        return Err(Error::Domain(format!("s_n is defined for n >= 1, got {n}")));
    }
    let t = tau_from_minus_one(p, n + 1);
    let num = &t[(n + 2) as usize] - &t[n as usize] - int(2);
    exact_div(&num, &p.arc_sum(), "s_n")
}

/// The primed quotients `(tau'_n, beta'_n, gamma'_n, delta'_n)`:
/// `(tau_n - n)/(a+b)`, `(beta_n - 2)/(a+b)`, `(gamma_n - 2n + 1)/(a+b)`,
/// `(delta_n - 1)/(a+b)`. All four divisions are exact whenever `a + b >= 1`;
/// a remainder signals an implementation bug.
pub fn primed(n: i64, p: &SequenceParams) -> Result<(BigInt, BigInt, BigInt, BigInt)> {
    require_positive_arc_sum(p, "primed sequences")?;
    if n < 0 {
        return Err(Error::Domain(format!(
            "primed sequences are defined for n >= 0, got {n}"
        )));
    }
    let d = p.arc_sum();
    let tau_n = tau(n, p)?;
    let beta_n = beta(n, p)?;
    let gamma_n = gamma(n, p)?;
    let delta_n = delta(n, p)?;
    Ok((
        exact_div(&(&tau_n - int(n)), &d, "tau'")?,
        exact_div(&(&beta_n - int(2)), &d, "beta'")?,
        exact_div(&(&gamma_n - int(2 * n) + BigInt::one()), &d, "gamma'")?,
        exact_div(&(&delta_n - BigInt::one()), &d, "delta'")?,
    ))
}

/// All sequence values for a fixed `(a, b)` up to index `n_max`, materialized
/// in one pass. Requires `a + b >= 1` because the quotient sequences are part
/// of the table.
#[derive(Clone, Debug)]
pub struct SequenceTable {
    pub params: SequenceParams,
    pub n_max: i64,
    tau: Vec<BigInt>,   // tau[-1 ..= n_max + 1], shifted by one
    beta: Vec<BigInt>,  // beta[0 ..= n_max]
    gamma: Vec<BigInt>, // gamma[0 ..= n_max]
    delta: Vec<BigInt>, // delta[0 ..= n_max]
    rho: Vec<BigInt>,   // rho[1 ..= n_max + 1], shifted
    s_n: Vec<BigInt>,   // s[1 ..= n_max], shifted
    primed: Vec<(BigInt, BigInt, BigInt, BigInt)>, // index 0 ..= n_max
}

impl SequenceTable {
    pub fn build(params: SequenceParams, n_max: i64) -> Result<SequenceTable> {
        require_positive_arc_sum(&params, "sequence table")?;
        if n_max < 1 {
            return Err(Error::Domain(format!(
                "sequence table needs n_max >= 1, got {n_max}"
            )));
        }
        let d = params.arc_sum();
        let top = n_max as usize;
        let tau = tau_from_minus_one(&params, n_max + 1);
        let beta = beta_values(&params, top);
        let gamma = gamma_values(&params, top);
        let delta = delta_values(&params, top);
        let mut rho = Vec::with_capacity(top + 1);
        for n in 1..=(top + 1) {
            let num = &tau[n + 1] - &tau[n] - BigInt::one();
            rho.push(exact_div(&num, &d, "rho")?);
        }
        let mut s_n = Vec::with_capacity(top);
        for n in 1..=top {
            let num = &tau[n + 2] - &tau[n] - int(2);
            s_n.push(exact_div(&num, &d, "s_n")?);
        }
        let mut primed = Vec::with_capacity(top + 1);
        for n in 0..=top {
            primed.push((
                exact_div(&(&tau[n + 1] - int(n as i64)), &d, "tau'")?,
                exact_div(&(&beta[n] - int(2)), &d, "beta'")?,
                exact_div(
                    &(&gamma[n] - int(2 * n as i64) + BigInt::one()),
                    &d,
                    "gamma'",
                )?,
                exact_div(&(&delta[n] - BigInt::one()), &d, "delta'")?,
            ));
        }
        Ok(SequenceTable {
            params,
            n_max,
            tau,
            beta,
            gamma,
            delta,
            rho,
            s_n,
            primed,
        })
    }

    /// `tau_n` for `-1 <= n <= n_max + 1`.
    pub fn tau(&self, n: i64) -> &BigInt {
        &self.tau[(n + 1) as usize]
    }

    pub fn beta(&self, n: i64) -> &BigInt {
        &self.beta[n as usize]
    }

    pub fn gamma(&self, n: i64) -> &BigInt {
        &self.gamma[n as usize]
    }

    pub fn delta(&self, n: i64) -> &BigInt {
        &self.delta[n as usize]
    }

    /// `rho_n` for `1 <= n <= n_max + 1`.
    pub fn rho(&self, n: i64) -> &BigInt {
        &self.rho[(n - 1) as usize]
    }

    /// `s_n` for `1 <= n <= n_max`.
    pub fn s_n(&self, n: i64) -> &BigInt {
        &self.s_n[(n - 1) as usize]
    }

    pub fn tau_prime(&self, n: i64) -> &BigInt {
        &self.primed[n as usize].0
    }

    pub fn beta_prime(&self, n: i64) -> &BigInt {
        &self.primed[n as usize].1
    }

    pub fn gamma_prime(&self, n: i64) -> &BigInt {
        &self.primed[n as usize].2
    }

    pub fn delta_prime(&self, n: i64) -> &BigInt {
        &self.primed[n as usize].3
    }
}

/// Evaluates the identity suite at index `n` and reports pass/fail per
/// identity. Everything is checked in exact integers.
///
/// The suite covers the telescoping partial-sum identity, the Cassini-style
/// determinant identity, the `rho` step relations, the half-index
/// factorizations of `tau`, `tau +- 1`, `rho` and `s_n` (even and odd cases),
/// and the coprimality of consecutive terms.
pub fn check_identities(n: i64, p: &SequenceParams) -> Result<Vec<IdentityCheck>> {
    require_positive_arc_sum(p, "identity checks")?;
    if n < 1 {
        return Err(Error::Domain(format!(
            "identity checks need n >= 1, got {n}"
        )));
    }
    let t = SequenceTable::build(*p, n + 1)?;
    let arc = p.arc_sum();
    let mut checks = Vec::new();
    let mut push = |name: &'static str, holds: bool| checks.push(IdentityCheck { name, holds });

    // sum_{i=0}^{n-1} tau_i == rho_n
    let partial: BigInt = (0..n).map(|i| t.tau(i)).sum();
    push("partial_sum_equals_rho", &partial == t.rho(n));

    // tau_{n-1}^2 - tau_n * tau_{n-2} == 1
    let cassini = t.tau(n - 1) * t.tau(n - 1) - t.tau(n) * t.tau(n - 2);
    push("cassini", cassini.is_one());

    // rho_{n+1} == tau_n + rho_n
    push("rho_step", t.rho(n + 1) == &(t.tau(n) + t.rho(n)));

    // tau_n^2 - (a+b) * rho_n * rho_{n+1} == s_n
    let s_rel = t.tau(n) * t.tau(n) - &arc * t.rho(n) * t.rho(n + 1);
    push("s_from_rho_product", &s_rel == t.s_n(n));

    if n % 2 == 0 {
        let m = n / 2;
        push("even_tau_split", t.tau(n) == &(t.tau(m) * t.beta(m)));
        push(
            "even_tau_pred_plus_one",
            t.tau(n - 1) + BigInt::one() == t.tau(m) * t.beta(m - 1),
        );
        push(
            "even_tau_pred_minus_one",
            t.tau(n - 1) - BigInt::one() == t.tau(m - 1) * t.beta(m),
        );
        push("even_rho_split", t.rho(n) == &(t.tau(m) * t.gamma(m)));
        let expected = (&arc + int(4)) * t.tau(m) * t.tau(m);
        push("even_s_split", t.s_n(n) == &expected);
    } else {
        let m = (n - 1) / 2;
        push("odd_tau_split", t.tau(n) == &(t.gamma(m + 1) * t.delta(m)));
        if m >= 1 {
            push(
                "odd_tau_pred_plus_one",
                t.tau(n - 1) + BigInt::one() == t.gamma(m + 1) * t.delta(m - 1),
            );
        }
        push(
            "odd_tau_pred_minus_one",
            t.tau(n - 1) - BigInt::one() == t.gamma(m) * t.delta(m),
        );
        push("odd_rho_split", t.rho(n) == &(t.tau(m) * t.gamma(m + 1)));
        push(
            "odd_s_split",
            t.s_n(n) == &(t.gamma(m + 1) * t.gamma(m + 1)),
        );
    }

    push("gcd_tau", t.tau(n).gcd(t.tau(n - 1)).is_one());
    push("gcd_gamma", t.gamma(n).gcd(t.gamma(n - 1)).is_one());
    push("gcd_delta", t.delta(n).gcd(t.delta(n - 1)).is_one());
    let beta_gcd = t.beta(n).gcd(t.beta(n - 1));
    let expected_beta_gcd = if (p.a + p.b).is_multiple_of(2) {
        int(2)
    } else {
        int(1)
    };
    push("gcd_beta_parity", beta_gcd == expected_beta_gcd);

    Ok(checks)
}
