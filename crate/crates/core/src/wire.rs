//! JSON and text formats. All set, column and witness indices are 1-based.

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{validate_matrix, ColumnSubset, SigmaMatrix, SupportVector, MAX_SUBSET_SIZE};
use crate::poles::{LRange, PoleFamily, PoleReport, L_RANGE_CONVENTION};
use crate::polyhedra::{HalfspaceSystem, VerificationReport};
use crate::weights::{Decomposition, WeightInstance};
use crate::zeta::{EvalResult, MellinCheck};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<f64>>,
}

impl From<&SigmaMatrix> for MatrixJson {
    fn from(a: &SigmaMatrix) -> Self {
        Self {
            rows: a.rows(),
            cols: a.cols(),
            entries: a.to_rows(),
        }
    }
}

impl TryFrom<MatrixJson> for SigmaMatrix {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self> {
        if m.entries.len() != m.rows {
            return Err(Error::DimensionMismatch {
                expected: m.rows,
                found: m.entries.len(),
            });
        }
        let a = validate_matrix(m.entries)?;
        if a.cols() != m.cols {
            return Err(Error::DimensionMismatch {
                expected: m.cols,
                found: a.cols(),
            });
        }
        Ok(a)
    }
}

/// Parses a matrix given either as JSON `{"rows", "cols", "entries"}` or as
/// plain text with one whitespace-separated row per line.
pub fn parse_matrix(text: &str) -> Result<SigmaMatrix> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let m: MatrixJson =
            serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        return m.try_into();
    }
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: `{tok}` is not a number", k + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    validate_matrix(rows)
}

/// `l_range`: the string `"all"` or a list of integers.
impl Serialize for LRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LRange::All => s.serialize_str("all"),
            LRange::Finite(ls) => ls.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for LRange {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            List(Vec<u32>),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w == "all" => Ok(LRange::All),
            Raw::Word(w) => Err(de::Error::custom(format!("unknown l_range `{w}`"))),
            Raw::List(ls) => Ok(LRange::Finite(ls)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub mu: Vec<u8>,
    pub nu: u32,
    pub l_range: LRange,
    pub witnesses: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub mu: Vec<u8>,
    pub rhs: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleReportJson {
    pub n: usize,
    pub r: usize,
    pub l_range_convention: String,
    pub families: Vec<FamilyJson>,
    pub convergence: Vec<ConstraintJson>,
}

impl From<&PoleReport> for PoleReportJson {
    fn from(rep: &PoleReport) -> Self {
        Self {
            n: rep.n,
            r: rep.r,
            l_range_convention: L_RANGE_CONVENTION.to_string(),
            families: rep
                .families
                .iter()
                .map(|f| FamilyJson {
                    mu: f.mu.to_vec(),
                    nu: f.nu,
                    l_range: f.l_range.clone(),
                    witnesses: f.witnesses.iter().map(ColumnSubset::one_based).collect(),
                })
                .collect(),
            convergence: rep
                .convergence
                .constraints()
                .iter()
                .map(|c| ConstraintJson {
                    mu: c.normal.to_vec(),
                    rhs: c.rhs,
                })
                .collect(),
        }
    }
}

impl TryFrom<PoleReportJson> for PoleReport {
    type Error = Error;

    fn try_from(j: PoleReportJson) -> Result<Self> {
        let families = j
            .families
            .into_iter()
            .map(|f| {
                let witnesses = f
                    .witnesses
                    .iter()
                    .map(|w| ColumnSubset::from_one_based(w, j.r.min(MAX_SUBSET_SIZE)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(PoleFamily {
                    mu: support_from(&f.mu, j.n)?,
                    nu: f.nu,
                    l_range: f.l_range,
                    witnesses,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let pairs = j
            .convergence
            .iter()
            .filter(|c| c.rhs > 0)
            .map(|c| Ok((support_from(&c.mu, j.n)?, c.rhs)))
            .collect::<Result<Vec<_>>>()?;
        let convergence = HalfspaceSystem::from_pairs(j.n, pairs);
        if convergence.constraints().len() != j.convergence.len() {
            return Err(Error::Parse(
                "convergence constraints are inconsistent".into(),
            ));
        }
        Ok(PoleReport {
            n: j.n,
            r: j.r,
            families,
            convergence,
        })
    }
}

fn support_from(bits: &[u8], n: usize) -> Result<SupportVector> {
    if bits.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bits.len(),
        });
    }
    SupportVector::from_bits(bits)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJson {
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
    pub sigma: Vec<f64>,
    #[serde(default)]
    pub strict: bool,
}

impl From<&WeightInstance> for InstanceJson {
    fn from(inst: &WeightInstance) -> Self {
        Self {
            n: inst.n(),
            sets: inst.sets_one_based(),
            sigma: inst.sigma().to_vec(),
            strict: inst.strict(),
        }
    }
}

impl TryFrom<InstanceJson> for WeightInstance {
    type Error = Error;

    fn try_from(j: InstanceJson) -> Result<Self> {
        if j.sigma.len() != j.n {
            return Err(Error::DimensionMismatch {
                expected: j.n,
                found: j.sigma.len(),
            });
        }
        WeightInstance::new(j.n, &j.sets, j.sigma, j.strict)
    }
}

pub fn parse_instance(text: &str) -> Result<WeightInstance> {
    let j: InstanceJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    j.try_into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub parts: Vec<Vec<f64>>,
}

impl From<&Decomposition> for DecompositionJson {
    fn from(d: &Decomposition) -> Self {
        Self {
            parts: d.parts.clone(),
        }
    }
}

impl From<DecompositionJson> for Decomposition {
    fn from(j: DecompositionJson) -> Self {
        Decomposition { parts: j.parts }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResultJson {
    pub value: ComplexJson,
    /// `null` when the sequence was too short to estimate an error.
    pub error_estimate: Option<f64>,
    pub terms_used: u64,
    pub converged: bool,
    pub partial_sum: ComplexJson,
    pub cutoff: u64,
    pub tail: String,
}

impl From<&EvalResult> for EvalResultJson {
    fn from(r: &EvalResult) -> Self {
        Self {
            value: r.value.into(),
            error_estimate: r.error_estimate.is_finite().then_some(r.error_estimate),
            terms_used: r.terms_used,
            converged: r.converged,
            partial_sum: r.partial_sum.into(),
            cutoff: r.cutoff,
            tail: r.tail.clone(),
        }
    }
}

impl From<EvalResultJson> for EvalResult {
    fn from(j: EvalResultJson) -> Self {
        EvalResult {
            value: j.value.into(),
            error_estimate: j.error_estimate.unwrap_or(f64::INFINITY),
            terms_used: j.terms_used,
            converged: j.converged,
            partial_sum: j.partial_sum.into(),
            cutoff: j.cutoff,
            tail: j.tail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetVerificationJson {
    #[serde(rename = "J")]
    pub subset: Vec<usize>,
    pub samples: usize,
    pub agree: usize,
    pub discarded: usize,
    pub disagree: Vec<Vec<f64>>,
}

impl From<&VerificationReport> for SubsetVerificationJson {
    fn from(r: &VerificationReport) -> Self {
        Self {
            subset: r.subset.one_based(),
            samples: r.samples,
            agree: r.agree,
            discarded: r.discarded,
            disagree: r.disagree.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReportJson {
    pub samples: usize,
    pub seed: u64,
    pub pass: bool,
    pub subsets: Vec<SubsetVerificationJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MellinCheckJson {
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
}

impl From<&MellinCheck> for MellinCheckJson {
    fn from(c: &MellinCheck) -> Self {
        Self {
            s: c.s,
            lhs: c.lhs,
            rhs: c.rhs,
            abs_diff: c.abs_diff,
        }
    }
}

/// Serializes with a trailing newline.
pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SubsetCap;
    use crate::poles::enumerate_pole_families;

    fn round_trip<T>(value: &T) -> T
    where
        T: Serialize + for<'de> Deserialize<'de>,
    {
        serde_json::from_str(&serde_json::to_string(value).unwrap()).unwrap()
    }

    #[test]
    fn matrix_formats() {
        let a = parse_matrix(r#"{"rows":2,"cols":2,"entries":[[1,0],[1,1]]}"#).unwrap();
        let b = parse_matrix("1 0\n  1 1\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_matrix("0 0\n1 1"), Err(Error::ZeroRow(1)));
        assert!(matches!(parse_matrix("1 x"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_matrix(r#"{"rows":3,"cols":2,"entries":[[1,0],[1,1]]}"#),
            Err(Error::DimensionMismatch { .. })
        ));
        let j = MatrixJson::from(&a);
        assert_eq!(SigmaMatrix::try_from(round_trip(&j)).unwrap(), a);
    }

    #[test]
    fn pole_report_schema() {
        let a = parse_matrix("1 1\n1 1").unwrap();
        let rep = enumerate_pole_families(&a, SubsetCap::default()).unwrap();
        let v = serde_json::to_value(PoleReportJson::from(&rep)).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["families"][0]["mu"], serde_json::json!([1, 1]));
        assert_eq!(v["families"][0]["l_range"], "all");
        assert_eq!(
            v["families"][0]["witnesses"],
            serde_json::json!([[1], [2], [1, 2]])
        );
        assert_eq!(
            v["convergence"][0],
            serde_json::json!({"mu": [1, 1], "rhs": 2})
        );
    }

    #[test]
    fn pole_report_round_trips() {
        let a = parse_matrix("1 0 0\n1 1 1\n0 1 0").unwrap();
        let rep = enumerate_pole_families(&a, SubsetCap::default()).unwrap();
        let j = round_trip(&PoleReportJson::from(&rep));
        assert_eq!(j.families[0].l_range, LRange::Finite(vec![0]));
        assert_eq!(PoleReport::try_from(j).unwrap(), rep);
    }

    #[test]
    fn instance_and_decomposition_round_trip() {
        let text = r#"{"n":2,"sets":[[1],[1,2]],"sigma":[1.5,0.1]}"#;
        let inst = parse_instance(text).unwrap();
        assert!(!inst.strict());
        assert_eq!(
            WeightInstance::try_from(round_trip(&InstanceJson::from(&inst))).unwrap(),
            inst
        );
        assert!(parse_instance(r#"{"n":2,"sets":[[3]],"sigma":[1,1]}"#).is_err());
        let d = Decomposition {
            parts: vec![vec![0.1 + 0.2, 1.0 / 3.0]],
        };
        assert_eq!(
            Decomposition::from(round_trip(&DecompositionJson::from(&d))),
            d
        );
    }

    #[test]
    fn eval_result_round_trips_with_infinite_error() {
        let r = EvalResult {
            value: Complex64::new(1.0 / 3.0, -0.1),
            error_estimate: f64::INFINITY,
            terms_used: 1,
            converged: false,
            partial_sum: Complex64::new(1.0, 0.0),
            cutoff: 1,
            tail: "wynn".into(),
        };
        let j = round_trip(&EvalResultJson::from(&r));
        assert_eq!(j.error_estimate, None);
        assert_eq!(EvalResult::from(j), r);
    }

    proptest::proptest! {
        #[test]
        fn reals_round_trip_exactly(parts in proptest::collection::vec(
            proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 1..5),
            1..4,
        )) {
            let d = Decomposition { parts };
            let text = serde_json::to_string(&DecompositionJson::from(&d)).unwrap();
            let back: DecompositionJson = serde_json::from_str(&text).unwrap();
            proptest::prop_assert_eq!(Decomposition::from(back), d);
        }
    }
}
