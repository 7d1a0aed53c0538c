//! Ansatz files.
//!
//! ```json
//! {"n_orbitals": 4, "n_electrons": 2, "mode": "symbolic",
//!  "factors": [{"occ": [1], "virt": [3], "angle": "jb"}, {"occ": [0], "virt": [2]}]}
//! ```
//!
//! Factor order is display order: the last factor acts first on the reference.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use ucc_core::identities::UCCFactor;
use ucc_core::opalg::OrbitalSpace;
use ucc_core::symcoef::{check_domain, AngleId, Assignment};

use crate::report::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Numeric,
    #[default]
    Symbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleSpec {
    Value(f64),
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub occ: Vec<usize>,
    pub virt: Vec<usize>,
    #[serde(default)]
    pub angle: Option<AngleSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub n_orbitals: usize,
    pub n_electrons: usize,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub factors: Vec<FactorSpec>,
}

/// Parsed and validated ansatz.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pub spec: AnsatzSpec,
    pub space: OrbitalSpace,
    pub factors: Vec<UCCFactor>,
    /// Angle values given in the file (numeric mode only).
    pub given: Option<Assignment>,
}

/// `t_{i,j}^{a,b}` from the factor's indices.
pub fn auto_label(occ: &[usize], virt: &[usize]) -> String {
    let join = |xs: &[usize]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    format!("t_{{{}}}^{{{}}}", join(occ), join(virt))
}

impl AnsatzSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("ansatz file: {}", e)))
    }

    pub fn build(&self) -> Result<Ansatz, CliError> {
        let space = OrbitalSpace::new(self.n_orbitals, self.n_electrons)?;
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut factors = Vec::with_capacity(self.factors.len());
        let mut given = Assignment::new();
        for (k, f) in self.factors.iter().enumerate() {
            let label = match (&f.angle, self.mode) {
                (Some(AngleSpec::Label(l)), Mode::Symbolic) => l.clone(),
                (Some(AngleSpec::Label(l)), Mode::Numeric) => {
                    return Err(CliError::Input(format!("factor {}: numeric mode needs a number, got {:?}", k, l)))
                }
                _ => auto_label(&f.occ, &f.virt),
            };
            let count = seen.entry(label.clone()).or_insert(0);
            *count += 1;
            let label = if *count > 1 { format!("{}#{}", label, count) } else { label };
            let angle = AngleId::new(&label);
            let factor = UCCFactor::new(&space, angle.clone(), &f.occ, &f.virt)
                .map_err(|e| CliError::Input(format!("factor {}: {}", k, e)))?;
            match (&f.angle, self.mode) {
                (Some(AngleSpec::Value(v)), Mode::Numeric) => {
                    check_domain(&angle, *v)?;
                    given.insert(angle, *v);
                }
                (None, Mode::Numeric) => {
                    return Err(CliError::Input(format!("factor {}: numeric mode needs an angle value", k)))
                }
                (Some(AngleSpec::Value(_)), Mode::Symbolic) => {
                    return Err(CliError::Input(format!("factor {}: symbolic mode takes a label, not a number", k)))
                }
                _ => {}
            }
            factors.push(factor);
        }
        Ok(Ansatz {
            spec: self.clone(),
            space,
            given: (self.mode == Mode::Numeric).then_some(given),
            factors,
        })
    }
}

impl Ansatz {
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        AnsatzSpec::parse(text)?.build()
    }

    pub fn require_values(&self) -> Result<&Assignment, CliError> {
        self.given
            .as_ref()
            .ok_or_else(|| CliError::Input("this command needs a numeric-mode ansatz".into()))
    }
}
