//! Degree-2 correlation diagnostics for message partitions of the cube.
//!
//! For a partition of {0,1}^n into message classes X_m, the quantity
//! sum_{i != j} (beta^m_ij)^2 with beta^m_ij = E_{x in X_m}[(-1)^(x_i + x_j)]
//! is controlled by O(log 1/p_m)^2. The hidden constant is nonconstructive,
//! so this module only reports the ratio of the two sides, never asserts it.

use serde::{Deserialize, Serialize};

use crate::bitcore::{full_matchings, BitString, Matching};
use crate::strategies::HmOutput;
use crate::{Error, Result};

/// Diagnostics for one message class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MessageDiagnostic {
    pub message: usize,
    /// p_m: fraction of the cube sending this message.
    pub p: f64,
    /// beta_ij row-major (n x n, zero diagonal).
    pub beta: Vec<f64>,
    /// sum over ordered pairs i != j of beta_ij^2.
    pub lhs: f64,
    /// ln(1/p_m)^2 (natural log), the bound's core without its constant.
    pub rhs_core: f64,
    /// lhs / rhs_core; infinite when p_m = 1 and lhs > 0 never happens there.
    pub ratio: f64,
    /// Advantage eps_m of the supplied Bob strategy on this message class.
    pub eps: Option<f64>,
    /// sum over unordered pairs of q_m(i,j)^2 for the supplied Bob strategy.
    pub q_sq_sum: Option<f64>,
    /// Cauchy-Schwarz chain bound on eps_m:
    /// sqrt(q_sq_sum * lhs / 2) / 2 (unordered-pair convention).
    pub cs_bound: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KklDiagnostic {
    pub n: usize,
    pub messages: Vec<MessageDiagnostic>,
}

/// Computes the diagnostic for a partition of {0,1}^n given as the list of
/// per-message input classes. Empty classes are skipped. When a Bob decoder
/// for the communication problem is supplied, the per-message advantage and
/// the Cauchy-Schwarz chain quantities are filled in (uniform full-family
/// matchings, so n must stay under the matching cap).
pub fn kkl_diagnostic(
    n: usize,
    partition: &[Vec<BitString>],
    bob: Option<&dyn Fn(usize, &Matching) -> HmOutput>,
) -> Result<KklDiagnostic> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let size = 1usize << n;
    let mut seen = vec![false; size];
    let mut covered = 0usize;
    for class in partition {
        for x in class {
            if x.len() != n {
                return Err(Error::PartitionNotCovering(format!(
                    "string {x} has length {}, expected {n}",
                    x.len()
                )));
            }
            let idx = x.to_index();
            if seen[idx] {
                return Err(Error::PartitionNotCovering(format!(
                    "string {x} appears in two classes"
                )));
            }
            seen[idx] = true;
            covered += 1;
        }
    }
    if covered != size {
        return Err(Error::PartitionNotCovering(format!(
            "{covered} of {size} strings covered"
        )));
    }

    let matchings = match bob {
        Some(_) => Some(full_matchings(n)?),
        None => None,
    };

    let mut messages = Vec::new();
    for (msg, class) in partition.iter().enumerate() {
        if class.is_empty() {
            continue;
        }
        let p = class.len() as f64 / size as f64;
        let mut beta = vec![0.0f64; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let mut acc = 0i64;
                for x in class {
                    acc += if x.get(i) ^ x.get(j) { -1 } else { 1 };
                }
                let b = acc as f64 / class.len() as f64;
                beta[i * n + j] = b;
                beta[j * n + i] = b;
            }
        }
        let lhs: f64 = beta.iter().map(|b| b * b).sum();
        let log_term = (1.0 / p).ln();
        let rhs_core = log_term * log_term;
        let ratio = if rhs_core > 0.0 {
            lhs / rhs_core
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };

        let (eps, q_sq_sum, cs_bound) = match (&bob, &matchings) {
            (Some(decode), Some(matchings)) => {
                let mut q: std::collections::HashMap<(usize, usize), f64> =
                    std::collections::HashMap::new();
                let mut wins = 0.0f64;
                for m in matchings {
                    let out = decode(msg, m);
                    let key = (out.pair.0.min(out.pair.1), out.pair.0.max(out.pair.1));
                    *q.entry(key).or_insert(0.0) += 1.0 / matchings.len() as f64;
                    for x in class {
                        let parity = x.get(out.pair.0) ^ x.get(out.pair.1);
                        if (out.v == 1) == parity {
                            wins += 1.0;
                        }
                    }
                }
                let eps = wins / (class.len() * matchings.len()) as f64 - 0.5;
                let q_sq: f64 = q.values().map(|v| v * v).sum();
                let cs = (q_sq * lhs / 2.0).sqrt() / 2.0;
                (Some(eps), Some(q_sq), Some(cs))
            }
            _ => (None, None, None),
        };

        messages.push(MessageDiagnostic {
            message: msg,
            p,
            beta,
            lhs,
            rhs_core,
            ratio,
            eps,
            q_sq_sum,
            cs_bound,
        });
    }
    Ok(KklDiagnostic { n, messages })
}
