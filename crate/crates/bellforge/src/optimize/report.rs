use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Where the classical figure came from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassicalSide {
    pub value: f64,
    /// "brute-force-exact", "brute-force-heuristic", "local-search" or
    /// "bound-formula".
    pub provenance: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationMode {
    /// quantum / classical, the plain value ratio.
    Ratio,
    /// |quantum - 1/2| / |classical - 1/2|, the shifted-functional form.
    Deviation,
}

/// The assembled comparison between classical and entangled values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ViolationReport {
    pub game: String,
    pub classical_value_or_bound: f64,
    pub classical_provenance: String,
    pub quantum_value: f64,
    pub quantum_provenance: String,
    pub mode: ViolationMode,
    /// quantum / classical (None when the denominator vanishes).
    pub ratio: Option<f64>,
    /// |quantum - 1/2| / |classical - 1/2| (None when the denominator vanishes).
    pub deviation_ratio: Option<f64>,
    /// The figure selected by `mode`.
    pub violation: f64,
}

pub fn violation_report(
    game: impl Into<String>,
    classical: ClassicalSide,
    quantum_value: f64,
    quantum_provenance: impl Into<String>,
    mode: ViolationMode,
) -> Result<ViolationReport> {
    let ratio = (classical.value != 0.0).then(|| quantum_value / classical.value);
    let classical_dev = (classical.value - 0.5).abs();
    let deviation_ratio = (classical_dev != 0.0).then(|| (quantum_value - 0.5).abs() / classical_dev);
    let violation = match mode {
        ViolationMode::Ratio => ratio.ok_or_else(|| {
            Error::InvalidParameter("ratio mode needs a nonzero classical value".into())
        })?,
        ViolationMode::Deviation => deviation_ratio.ok_or_else(|| {
            Error::InvalidParameter(
                "deviation mode needs a classical value away from 1/2".into(),
            )
        })?,
    };
    Ok(ViolationReport {
        game: game.into(),
        classical_value_or_bound: classical.value,
        classical_provenance: classical.provenance,
        quantum_value,
        quantum_provenance: quantum_provenance.into(),
        mode,
        ratio,
        deviation_ratio,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chsh_ratio() {
        let r = violation_report(
            "chsh",
            ClassicalSide {
                value: 0.75,
                provenance: "brute-force-exact".into(),
            },
            (std::f64::consts::FRAC_PI_8).cos().powi(2),
            "exact-enum",
            ViolationMode::Ratio,
        )
        .unwrap();
        assert!((r.violation - 1.138071).abs() < 1e-5);
    }

    #[test]
    fn kv_ratio_at_desk_scale() {
        let r = violation_report(
            "kv(n=16, eta=0.25)",
            ClassicalSide {
                value: 16f64.powf(-1.0 / 3.0),
                provenance: "bound-formula".into(),
            },
            0.296875,
            "closed-form",
            ViolationMode::Ratio,
        )
        .unwrap();
        assert!(r.violation >= 0.74);
        assert!((r.violation - 0.296875 * 16f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn deviation_mode_numerator_for_a_perfect_quantum_strategy() {
        let r = violation_report(
            "hmnl(n=4)",
            ClassicalSide {
                value: 0.75,
                provenance: "brute-force-exact".into(),
            },
            1.0,
            "exact-enum",
            ViolationMode::Deviation,
        )
        .unwrap();
        assert!((r.deviation_ratio.unwrap() - 2.0).abs() < 1e-12); // 0.5 / 0.25
    }

    #[test]
    fn zero_denominators_error() {
        let flat = ClassicalSide {
            value: 0.5,
            provenance: "bound-formula".into(),
        };
        assert!(violation_report("g", flat, 1.0, "exact", ViolationMode::Deviation).is_err());
        let zero = ClassicalSide {
            value: 0.0,
            provenance: "bound-formula".into(),
        };
        assert!(violation_report("g", zero, 1.0, "exact", ViolationMode::Ratio).is_err());
    }
}
