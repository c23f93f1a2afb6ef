//! JSON inputs for sequences, flat functions, kernels and series.

use serde::{Deserialize, Serialize};
use ultraflat_core::flat::{flat_halfplane_with, flat_ramified_with, FlatOptions};
use ultraflat_core::{
    check_seq, convolve, flat_q_gevrey_s2, flat_q_gevrey_sgamma, from_log_terms, gevrey, hat, log_grid, m_alpha_beta,
    power, q_gevrey, reference_exp, FlatFunction, QuadConfig, Sector, TailModel, WeightSequence,
};

use crate::error::{CliError, CliResult};

pub const DEFAULT_PREFIX: usize = 256;

/// A weight sequence: `{"kind": …, "params": {…}, "n": …}`.
///
/// `n` is the prefix length; nested sequences inherit it unless they set
/// their own.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSequence")]
pub struct SequenceSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Gevrey {
        alpha: f64,
    },
    QGevrey {
        q: f64,
        sigma: f64,
    },
    AlphaBeta {
        alpha: f64,
        beta: f64,
    },
    /// `ln M_0, ln M_1, …`; no tail model.
    Custom {
        log_terms: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Convolve {
        left: Box<SequenceSpec>,
        right: Box<SequenceSpec>,
    },
    Power {
        of: Box<SequenceSpec>,
        s: f64,
    },
    Hat {
        of: Box<SequenceSpec>,
    },
    Check {
        of: Box<SequenceSpec>,
    },
}

/// Strict form of [`SequenceSpec`]: flattening would accept unknown keys.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSequence {
    kind: serde_json::Value,
    #[serde(default)]
    params: serde_json::Value,
    #[serde(default)]
    n: Option<usize>,
}

impl TryFrom<RawSequence> for SequenceSpec {
    type Error = serde_json::Error;

    fn try_from(raw: RawSequence) -> Result<Self, Self::Error> {
        let family = serde_json::from_value(serde_json::json!({ "kind": raw.kind, "params": raw.params }))?;
        Ok(Self { family, n: raw.n })
    }
}

impl SequenceSpec {
    pub fn new(family: Family) -> Self {
        Self { family, n: None }
    }

    pub fn build(&self, default_n: usize) -> CliResult<WeightSequence> {
        let n = self.n.unwrap_or(default_n);
        Ok(match &self.family {
            Family::Gevrey { alpha } => gevrey(*alpha, n)?,
            Family::QGevrey { q, sigma } => q_gevrey(*q, *sigma, n)?,
            Family::AlphaBeta { alpha, beta } => m_alpha_beta(*alpha, *beta, n)?,
            Family::Custom { log_terms, label } => {
                from_log_terms(label.as_deref().unwrap_or("custom"), log_terms, TailModel::None)?
            }
            Family::Convolve { left, right } => convolve(&left.build(n)?, &right.build(n)?)?,
            Family::Power { of, s } => power(&of.build(n)?, *s)?,
            Family::Hat { of } => hat(&of.build(n)?),
            Family::Check { of } => check_seq(&of.build(n)?),
        })
    }
}

/// How to build a flat function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case", deny_unknown_fields)]
pub enum FlatSpec {
    /// `exp(−P − iQ)` on `S_1`.
    Harmonic {
        sequence: SequenceSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma_hint: Option<f64>,
    },
    /// Ramification to `S_γ`.
    Ramified {
        sequence: SequenceSpec,
        gamma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma_hint: Option<f64>,
    },
    /// Closed-form q-Gevrey function on `S_γ`, `γ ≥ 2` (default 2).
    QGevrey {
        q: f64,
        sigma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    },
    /// `e^{−1/z}` on `S_γ`, checked against `sequence` (default gevrey(1)).
    ReferenceExp {
        gamma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sequence: Option<SequenceSpec>,
    },
    Product {
        left: Box<FlatSpec>,
        right: Box<FlatSpec>,
    },
}

impl FlatSpec {
    /// The flat function and the sequence it is measured against.
    pub fn build(&self, default_n: usize, quad: &QuadConfig) -> CliResult<(FlatFunction, WeightSequence)> {
        Ok(match self {
            Self::Harmonic { sequence, gamma_hint } => {
                let seq = sequence.build(default_n)?;
                let opts = FlatOptions { gamma_hint: *gamma_hint, quad: *quad };
                (flat_halfplane_with(&seq, &opts)?, seq)
            }
            Self::Ramified { sequence, gamma, s, gamma_hint } => {
                let seq = sequence.build(default_n)?;
                let opts = FlatOptions { gamma_hint: *gamma_hint, quad: *quad };
                (flat_ramified_with(&seq, *gamma, *s, &opts)?, seq)
            }
            Self::QGevrey { q, sigma, gamma } => {
                let f = match gamma {
                    None => flat_q_gevrey_s2(*q, *sigma)?,
                    Some(g) => flat_q_gevrey_sgamma(*q, *sigma, *g)?,
                };
                (f, q_gevrey(*q, *sigma, default_n)?)
            }
            Self::ReferenceExp { gamma, sequence } => {
                let seq = match sequence {
                    Some(s) => s.build(default_n)?,
                    None => gevrey(1.0, default_n)?,
                };
                (reference_exp(Sector::new(*gamma)?), seq)
            }
            Self::Product { left, right } => {
                let (a, sa) = left.build(default_n, quad)?;
                let (b, sb) = right.build(default_n, quad)?;
                let f = ultraflat_core::flat_product(&a, &b)?;
                (f, convolve(&sa, &sb)?)
            }
        })
    }

    /// True for routes that rely on a growth-index estimate.
    pub fn is_pipeline(&self) -> bool {
        matches!(self, Self::Harmonic { .. } | Self::Ramified { .. })
    }
}

/// Log-spaced grid `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn points(&self, override_points: Option<usize>) -> CliResult<Vec<f64>> {
        let n = override_points.unwrap_or(self.points);
        if !(self.lo > 0.0 && self.hi > self.lo && n >= 2) {
            return Err(CliError::Config(format!("bad grid [{}, {}] with {n} points", self.lo, self.hi)));
        }
        Ok(log_grid(self.lo, self.hi, n))
    }
}

/// Coefficients of a formal series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesSpec {
    Generator {
        generator: Generator,
        p_max: usize,
    },
    /// `[re, im]` pairs.
    Coeffs {
        coeffs: Vec<[f64; 2]>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// `a_p = (−1)^p M_p`.
    AlternatingMp,
    Zero,
}

/// Input of the `extend` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendSpec {
    pub series: SeriesSpec,
    #[serde(rename = "A")]
    pub a: f64,
    pub sequence: SequenceSpec,
    pub kernel: FlatSpec,
    pub radii: GridSpec,
    pub angles: usize,
    /// Largest `|θ|` as a fraction of the kernel's half-opening.
    pub angle_fraction: f64,
    pub p_max: usize,
    /// Moment orders computed; defaults to the series length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<usize>,
}

/// Input of the `moments` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsSpec {
    pub kernel: FlatSpec,
    pub sequence: SequenceSpec,
    pub p_max: usize,
}

/// Input of the `flat` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatCommandSpec {
    pub flat: FlatSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<f64>,
}

/// Input of the `sequence`, `assoc` and `harmonic` commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceCommandSpec {
    pub sequence: SequenceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

/// Input of the `convolve` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolveSpec {
    pub left: SequenceSpec,
    pub right: SequenceSpec,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_sequences() {
        let s: SequenceSpec = serde_json::from_str(
            r#"{"kind":"convolve","params":{"left":{"kind":"gevrey","params":{"alpha":1}},"right":{"kind":"power","params":{"s":2,"of":{"kind":"q_gevrey","params":{"q":2,"sigma":2},"n":32}}}},"n":64}"#,
        )
        .unwrap();
        // the convolution keeps the shorter prefix
        assert_eq!(s.build(16).unwrap().len(), 32);
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(serde_json::from_str::<SequenceSpec>(r#"{"kind":"gevrey","params":{"alpha":1,"beta":2}}"#).is_err());
        assert!(serde_json::from_str::<SequenceSpec>(r#"{"kind":"gevrey","params":{"alpha":1},"m":2}"#).is_err());
        assert!(serde_json::from_str::<FlatSpec>(r#"{"route":"nope"}"#).is_err());
    }

    #[test]
    fn series_forms() {
        let a: SeriesSpec = serde_json::from_str(r#"{"generator":"alternating_mp","p_max":10}"#).unwrap();
        assert_eq!(a, SeriesSpec::Generator { generator: Generator::AlternatingMp, p_max: 10 });
        let b: SeriesSpec = serde_json::from_str(r#"{"coeffs":[[1,0],[0,1]]}"#).unwrap();
        assert!(matches!(b, SeriesSpec::Coeffs { .. }));
    }
}
