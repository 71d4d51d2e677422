use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeKind, Dataset};
use crate::error::Error;

pub const DEFAULT_BINS: f64 = 10.0;
pub const DEFAULT_VARIANCE_COVERAGE: f64 = 0.95;

/// The pre-processing operator catalog, in catalog order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TransformKind {
    DiscretizeSupervised,
    DiscretizeUnsupervised,
    NominalToBinarySupervised,
    NominalToBinaryUnsupervised,
    Normalize,
    Standardize,
    ImputeMissingContinuous,
    ImputeMissingCategorical,
    PrincipalComponents,
}

impl TransformKind {
    pub const ALL: [TransformKind; 9] = [
        TransformKind::DiscretizeSupervised,
        TransformKind::DiscretizeUnsupervised,
        TransformKind::NominalToBinarySupervised,
        TransformKind::NominalToBinaryUnsupervised,
        TransformKind::Normalize,
        TransformKind::Standardize,
        TransformKind::ImputeMissingContinuous,
        TransformKind::ImputeMissingCategorical,
        TransformKind::PrincipalComponents,
    ];

    pub fn token(self) -> &'static str {
        match self {
            TransformKind::DiscretizeSupervised => "discretize_sup",
            TransformKind::DiscretizeUnsupervised => "discretize_unsup",
            TransformKind::NominalToBinarySupervised => "nominal_to_binary_sup",
            TransformKind::NominalToBinaryUnsupervised => "nominal_to_binary_unsup",
            TransformKind::Normalize => "normalize",
            TransformKind::Standardize => "standardize",
            TransformKind::ImputeMissingContinuous => "impute_continuous",
            TransformKind::ImputeMissingCategorical => "impute_categorical",
            TransformKind::PrincipalComponents => "pca",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.token() == token)
    }

    /// Local kinds target single attributes; the rest apply globally.
    pub fn is_local(self) -> bool {
        matches!(
            self,
            TransformKind::DiscretizeSupervised
                | TransformKind::DiscretizeUnsupervised
                | TransformKind::NominalToBinaryUnsupervised
        )
    }

    pub fn is_supervised(self) -> bool {
        matches!(
            self,
            TransformKind::DiscretizeSupervised | TransformKind::NominalToBinarySupervised
        )
    }

    pub fn input_kind(self) -> AttributeKind {
        match self {
            TransformKind::NominalToBinarySupervised
            | TransformKind::NominalToBinaryUnsupervised
            | TransformKind::ImputeMissingCategorical => AttributeKind::Categorical,
            _ => AttributeKind::Continuous,
        }
    }

    pub fn output_kind(self) -> AttributeKind {
        match self {
            TransformKind::DiscretizeSupervised
            | TransformKind::DiscretizeUnsupervised
            | TransformKind::ImputeMissingCategorical => AttributeKind::Categorical,
            _ => AttributeKind::Continuous,
        }
    }

    /// Parameter defaults, keyed by their text-form names.
    fn default_params(self) -> BTreeMap<String, f64> {
        let mut p = BTreeMap::new();
        match self {
            TransformKind::DiscretizeUnsupervised => {
                p.insert("bins".to_string(), DEFAULT_BINS);
            }
            TransformKind::PrincipalComponents => {
                p.insert("var".to_string(), DEFAULT_VARIANCE_COVERAGE);
            }
            _ => {}
        }
        p
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scope {
    Global,
    /// One attribute, by index into the dataset's attribute list.
    Local(usize),
    LocalAll,
}

/// One concrete pre-processing action.
///
/// Text form: `kind(scope[,key=value...])` where scope is `global`, `all` or
/// `attr=<index>`. A global spec that carries parameters omits the scope,
/// e.g. `pca(var=0.95)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformationSpec {
    pub kind: TransformKind,
    pub scope: Scope,
    pub params: BTreeMap<String, f64>,
}

impl TransformationSpec {
    pub fn new(kind: TransformKind, scope: Scope) -> Result<Self, Error> {
        Self::with_params(kind, scope, BTreeMap::new())
    }

    /// Builds a spec, filling defaults for absent parameters and checking that
    /// the scope is legal for the kind.
    pub fn with_params(
        kind: TransformKind,
        scope: Scope,
        params: BTreeMap<String, f64>,
    ) -> Result<Self, Error> {
        let mut full = kind.default_params();
        for (k, v) in params {
            if !full.contains_key(&k) {
                return Err(Error::SpecSyntax(format!("{}: unknown parameter `{k}`", kind.token())));
            }
            full.insert(k, v);
        }
        let spec = TransformationSpec {
            kind,
            scope,
            params: full,
        };
        let legal = match scope {
            Scope::Global => !kind.is_local(),
            Scope::Local(_) | Scope::LocalAll => kind.is_local(),
        };
        if !legal {
            return Err(Error::SpecSyntax(format!("{spec}: scope not legal for kind")));
        }
        if let Some(&b) = spec.params.get("bins") {
            if b < 1.0 || b.fract() != 0.0 {
                return Err(Error::SpecSyntax(format!("{spec}: bins must be a positive integer")));
            }
        }
        if let Some(&v) = spec.params.get("var") {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::SpecSyntax(format!("{spec}: var must lie in (0, 1]")));
            }
        }
        Ok(spec)
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    /// Whether this spec can be applied to `ds`.
    pub fn check_applicable(&self, ds: &Dataset) -> Result<(), Error> {
        let illegal = |reason: &str| Error::IllegalTransformation {
            spec: self.to_string(),
            reason: reason.to_string(),
        };
        let input = self.kind.input_kind();
        match self.scope {
            Scope::Local(i) => {
                if i >= ds.n_attributes() || i == ds.class_index() {
                    return Err(illegal("attribute index is not a predictor"));
                }
                if ds.attribute(i).kind != input {
                    return Err(illegal("attribute kind incompatible"));
                }
            }
            Scope::LocalAll | Scope::Global => {
                if ds.predictors_of(input).is_empty() {
                    return Err(illegal("no compatible predictor"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for TransformationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.scope {
            Scope::Global if !self.params.is_empty() => {}
            Scope::Global => parts.push("global".into()),
            Scope::LocalAll => parts.push("all".into()),
            Scope::Local(i) => parts.push(format!("attr={i}")),
        }
        for (k, v) in &self.params {
            parts.push(format!("{k}={v}"));
        }
        write!(f, "{}({})", self.kind.token(), parts.join(","))
    }
}

impl FromStr for TransformationSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::SpecSyntax(s.to_string());
        let s_trim = s.trim();
        let open = s_trim.find('(').ok_or_else(bad)?;
        let body = s_trim[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let kind = TransformKind::from_token(s_trim[..open].trim()).ok_or_else(bad)?;
        let mut scope = None;
        let mut params = BTreeMap::new();
        for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "global" => scope = Some(Scope::Global),
                "all" => scope = Some(Scope::LocalAll),
                _ => {
                    let (k, v) = part.split_once('=').ok_or_else(bad)?;
                    let (k, v) = (k.trim(), v.trim());
                    if k == "attr" {
                        scope = Some(Scope::Local(v.parse().map_err(|_| bad())?));
                    } else {
                        let value: f64 = v.parse().map_err(|_| bad())?;
                        if !value.is_finite() {
                            return Err(bad());
                        }
                        params.insert(k.to_string(), value);
                    }
                }
            }
        }
        let scope = scope.unwrap_or(Scope::Global);
        TransformationSpec::with_params(kind, scope, params)
    }
}

/// Every transformation applicable to `ds`, in catalog order then attribute
/// index. Local kinds yield one spec per compatible predictor and an `all`
/// spec when at least two exist; imputation kinds need a missing cell of
/// their type.
pub fn enumerate_applicable(ds: &Dataset) -> Vec<TransformationSpec> {
    let mut out = Vec::new();
    for kind in TransformKind::ALL {
        let compatible = ds.predictors_of(kind.input_kind());
        if compatible.is_empty() {
            continue;
        }
        if kind.is_local() {
            for &j in &compatible {
                out.push(TransformationSpec::new(kind, Scope::Local(j)).expect("legal local scope"));
            }
            if compatible.len() >= 2 {
                out.push(TransformationSpec::new(kind, Scope::LocalAll).expect("legal local scope"));
            }
        } else {
            let needs_missing = matches!(
                kind,
                TransformKind::ImputeMissingContinuous | TransformKind::ImputeMissingCategorical
            );
            if needs_missing
                && !compatible
                    .iter()
                    .any(|&j| ds.column(j).iter().any(|c| c.is_missing()))
            {
                continue;
            }
            out.push(TransformationSpec::new(kind, Scope::Global).expect("legal global scope"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_text() {
        let d = TransformationSpec::new(TransformKind::DiscretizeSupervised, Scope::Local(3)).unwrap();
        assert_eq!(d.to_string(), "discretize_sup(attr=3)");
        let n = TransformationSpec::new(TransformKind::Normalize, Scope::Global).unwrap();
        assert_eq!(n.to_string(), "normalize(global)");
        let p = TransformationSpec::new(TransformKind::PrincipalComponents, Scope::Global).unwrap();
        assert_eq!(p.to_string(), "pca(var=0.95)");
        let u = TransformationSpec::new(TransformKind::DiscretizeUnsupervised, Scope::LocalAll).unwrap();
        assert_eq!(u.to_string(), "discretize_unsup(all,bins=10)");
        assert_eq!("pca(var=0.95)".parse::<TransformationSpec>().unwrap(), p);
    }

    #[test]
    fn illegal_scopes_rejected() {
        assert!(TransformationSpec::new(TransformKind::Normalize, Scope::Local(0)).is_err());
        assert!(TransformationSpec::new(TransformKind::DiscretizeSupervised, Scope::Global).is_err());
        assert!("normalize(attr=1)".parse::<TransformationSpec>().is_err());
        assert!("pca(var=1.5)".parse::<TransformationSpec>().is_err());
        assert!("pca(bins=3)".parse::<TransformationSpec>().is_err());
        assert!("shuffle(global)".parse::<TransformationSpec>().is_err());
    }

    fn arb_spec() -> impl Strategy<Value = TransformationSpec> {
        (0usize..9, 0usize..40, any::<bool>(), 1u32..50, 1u32..=100).prop_map(
            |(k, attr, all, bins, var)| {
                let kind = TransformKind::ALL[k];
                let scope = if !kind.is_local() {
                    Scope::Global
                } else if all {
                    Scope::LocalAll
                } else {
                    Scope::Local(attr)
                };
                let mut params = BTreeMap::new();
                match kind {
                    TransformKind::DiscretizeUnsupervised => {
                        params.insert("bins".to_string(), bins as f64);
                    }
                    TransformKind::PrincipalComponents => {
                        params.insert("var".to_string(), var as f64 / 100.0);
                    }
                    _ => {}
                }
                TransformationSpec::with_params(kind, scope, params).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn text_round_trips(spec in arb_spec()) {
            let text = spec.to_string();
            prop_assert_eq!(text.parse::<TransformationSpec>().unwrap(), spec);
        }
    }
}
