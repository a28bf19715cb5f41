//! Static maximum-endurance-time models from the ergonomics literature.
//!
//! Coefficients are stored as published. Each model carries the `r` and
//! ICC reported when it was compared against the dynamic model's MET curve.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NormalizedLoad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    General,
    Shoulder,
    Elbow,
    Hand,
    BackHip,
}

impl Group {
    pub const ALL: [Group; 5] = [
        Group::General,
        Group::Shoulder,
        Group::Elbow,
        Group::Hand,
        Group::BackHip,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::General => "general",
            Group::Shoulder => "shoulder",
            Group::Elbow => "elbow",
            Group::Hand => "hand",
            Group::BackHip => "back-hip",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "general" => Ok(Group::General),
            "shoulder" => Ok(Group::Shoulder),
            "elbow" => Ok(Group::Elbow),
            "hand" => Ok(Group::Hand),
            "back-hip" | "back/hip" | "backhip" | "back_hip" => Ok(Group::BackHip),
            _ => Err(Error::UnknownGroup(s.to_string())),
        }
    }
}

/// Closed-form MET expression, `f` being the load fraction of MVC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Formula {
    /// `a · f^b`
    PowerLaw { a: f64, b: f64 },
    /// `a · exp(b · f)`
    Exponential { a: f64, b: f64 },
    /// `c0 + c1/f + c2/f² + c3/f³`
    RationalPolynomial { c: [f64; 4] },
    /// `a · (f - shift)^b`
    ShiftedPower { a: f64, shift: f64, b: f64 },
    /// `a · ((1 - f) / (f - shift))^b`
    ShiftedRatioPower { a: f64, shift: f64, b: f64 },
}

impl Formula {
    pub fn kind(&self) -> &'static str {
        match self {
            Formula::PowerLaw { .. } => "power-law",
            Formula::Exponential { .. } => "exponential",
            Formula::RationalPolynomial { .. } => "rational-polynomial",
            Formula::ShiftedPower { .. } | Formula::ShiftedRatioPower { .. } => "shifted-power",
        }
    }

    pub fn evaluate(&self, f: f64) -> f64 {
        match *self {
            Formula::PowerLaw { a, b } => a * f.powf(b),
            Formula::Exponential { a, b } => a * (b * f).exp(),
            Formula::RationalPolynomial { c } => {
                c[0] + c[1] / f + c[2] / (f * f) + c[3] / (f * f * f)
            }
            Formula::ShiftedPower { a, shift, b } => a * (f - shift).powf(b),
            Formula::ShiftedRatioPower { a, shift, b } => a * ((1.0 - f) / (f - shift)).powf(b),
        }
    }
}

fn signed(value: f64) -> String {
    if value < 0.0 {
        format!("- {}", -value)
    } else {
        format!("+ {value}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Formula::PowerLaw { a, b } => write!(out, "MET = {a} * f^({b})"),
            Formula::Exponential { a, b } => write!(out, "MET = {a} * exp({b} * f)"),
            Formula::RationalPolynomial { c } => write!(
                out,
                "MET = {} {}/f {}/f^2 {}/f^3",
                c[0],
                signed(c[1]),
                signed(c[2]),
                signed(c[3])
            ),
            Formula::ShiftedPower { a, shift, b } => write!(out, "MET = {a} * (f - {shift})^({b})"),
            Formula::ShiftedRatioPower { a, shift, b } => {
                write!(out, "MET = {a} * ((1 - f) / (f - {shift}))^({b})")
            }
        }
    }
}

/// Open lower bound, upper bound open or closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub lower: f64,
    pub upper: f64,
    pub upper_inclusive: bool,
}

impl Domain {
    pub const UNIT: Domain = Domain {
        lower: 0.0,
        upper: 1.0,
        upper_inclusive: true,
    };

    const fn above(lower: f64) -> Self {
        Domain {
            lower,
            upper: 1.0,
            upper_inclusive: true,
        }
    }

    pub fn contains(&self, f: f64) -> bool {
        f > self.lower && (f < self.upper || (self.upper_inclusive && f == self.upper))
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let close = if self.upper_inclusive { ']' } else { ')' };
        write!(f, "({}, {}{close}", self.lower, self.upper)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaticMetModel {
    pub id: &'static str,
    pub author: &'static str,
    pub group: Group,
    pub formula: Formula,
    pub domain: Domain,
    /// Pearson r reported against the dynamic model.
    pub reported_r: f64,
    /// ICC reported against the dynamic model.
    pub reported_icc: f64,
}

impl StaticMetModel {
    pub fn contains(&self, f: f64) -> bool {
        self.domain.contains(f)
    }
}

/// Evaluates `model` at `f`, refusing points outside its validity domain.
pub fn static_met(model: &StaticMetModel, f: NormalizedLoad) -> Result<f64> {
    let f = f.value();
    if !model.contains(f) {
        return Err(Error::Domain(format!(
            "{}: f_mvc = {f} outside domain {} (boundary at {})",
            model.id,
            model.domain,
            if f <= model.domain.lower {
                model.domain.lower
            } else {
                model.domain.upper
            }
        )));
    }
    let value = model.formula.evaluate(f);
    if !value.is_finite() || value < 0.0 {
        return Err(Error::Domain(format!(
            "{}: MET({f}) = {value} is not a finite non-negative time",
            model.id
        )));
    }
    Ok(value)
}

/// Reading of the Huijgens exponent. The published bracket exponent is
/// printed as -2.4, which makes MET grow with load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HuijgensVariant {
    /// Exponent 1/1.4; tracks Rohmert's general curve, from whose data the
    /// model was built.
    #[default]
    RohmertConsistent,
    /// Exponent +2.4.
    SignCorrected,
    /// Exponent -2.4, increasing in f.
    AsPrinted,
}

impl HuijgensVariant {
    pub fn exponent(self) -> f64 {
        match self {
            HuijgensVariant::RohmertConsistent => 1.0 / 1.4,
            HuijgensVariant::SignCorrected => 2.4,
            HuijgensVariant::AsPrinted => -2.4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HuijgensVariant::RohmertConsistent => "rohmert-consistent",
            HuijgensVariant::SignCorrected => "sign-corrected",
            HuijgensVariant::AsPrinted => "as-printed",
        }
    }
}

impl FromStr for HuijgensVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rohmert-consistent" => Ok(HuijgensVariant::RohmertConsistent),
            "sign-corrected" => Ok(HuijgensVariant::SignCorrected),
            "as-printed" => Ok(HuijgensVariant::AsPrinted),
            other => Err(Error::invalid(
                "huijgens_variant",
                format!("`{other}` (expected rohmert-consistent, sign-corrected or as-printed)"),
            )),
        }
    }
}

const fn model(
    id: &'static str,
    author: &'static str,
    group: Group,
    formula: Formula,
    domain: Domain,
    reported_r: f64,
    reported_icc: f64,
) -> StaticMetModel {
    StaticMetModel {
        id,
        author,
        group,
        formula,
        domain,
        reported_r,
        reported_icc,
    }
}

const fn power(a: f64, b: f64) -> Formula {
    Formula::PowerLaw { a, b }
}

const fn expo(a: f64, b: f64) -> Formula {
    Formula::Exponential { a, b }
}

fn table(huijgens: HuijgensVariant) -> Vec<StaticMetModel> {
    use Group::*;
    let unit = Domain::UNIT;
    vec![
        model(
            "rohmert-general",
            "Rohmert",
            General,
            Formula::RationalPolynomial {
                c: [-1.5, 2.1, -0.6, 0.1],
            },
            unit,
            0.9937,
            0.8820,
        ),
        model(
            "monod-scherrer",
            "Monod and Scherrer",
            General,
            Formula::ShiftedPower {
                a: 0.4167,
                shift: 0.14,
                b: -2.4,
            },
            Domain::above(0.14),
            0.8529,
            0.6474,
        ),
        model(
            "huijgens",
            "Huijgens",
            General,
            Formula::ShiftedRatioPower {
                a: 0.865,
                shift: 0.15,
                b: huijgens.exponent(),
            },
            Domain {
                lower: 0.15,
                upper: 1.0,
                upper_inclusive: false,
            },
            0.9964,
            0.8800,
        ),
        model(
            "sato-general",
            "Sato et al.",
            General,
            Formula::ShiftedPower {
                a: 0.3802,
                shift: 0.04,
                b: -1.44,
            },
            Domain::above(0.04),
            0.9992,
            0.8512,
        ),
        model(
            "manenica-general",
            "Manenica",
            General,
            expo(14.88, -4.48),
            unit,
            0.9927,
            0.9796,
        ),
        model(
            "sjogaard-general",
            "Sjogaard",
            General,
            power(0.2997, -2.14),
            unit,
            0.9935,
            0.9917,
        ),
        model(
            "rose-general",
            "Rose et al.",
            General,
            expo(7.96, -4.16),
            unit,
            0.9897,
            0.7080,
        ),
        model(
            "sato-shoulder",
            "Sato et al.",
            Shoulder,
            power(0.398, -1.29),
            unit,
            0.9997,
            0.7188,
        ),
        model(
            "rohmert-shoulder",
            "Rohmert et al.",
            Shoulder,
            power(0.2955, -1.658),
            unit,
            0.9987,
            0.5626,
        ),
        model(
            "mathiassen-ahsberg-shoulder",
            "Mathiassen and Ahsberg",
            Shoulder,
            expo(40.6092, -9.7),
            unit,
            0.9783,
            0.7737,
        ),
        model(
            "garg-shoulder",
            "Garg",
            Shoulder,
            power(0.5618, -1.7551),
            unit,
            0.9981,
            0.9029,
        ),
        model(
            "hagberg-elbow",
            "Hagberg",
            Elbow,
            power(0.298, -2.14),
            unit,
            0.9935,
            0.9921,
        ),
        model(
            "manenica-elbow",
            "Manenica",
            Elbow,
            expo(20.6972, -4.5),
            unit,
            0.9929,
            0.9271,
        ),
        model(
            "sato-elbow",
            "Sato et al.",
            Elbow,
            power(0.195, -2.52),
            unit,
            0.9838,
            0.9712,
        ),
        model(
            "rohmert-elbow",
            "Rohmert et al.",
            Elbow,
            power(0.2285, -1.391),
            unit,
            0.9997,
            0.7189,
        ),
        model(
            "rose2000-elbow",
            "Rose et al. 2000",
            Elbow,
            expo(20.6, -6.04),
            unit,
            0.9986,
            0.9594,
        ),
        model(
            "rose1992-elbow",
            "Rose et al. 1992",
            Elbow,
            expo(10.23, -4.69),
            unit,
            0.9943,
            0.7843,
        ),
        model(
            "manenica-hand",
            "Manenica",
            Hand,
            expo(16.6099, -4.5),
            unit,
            0.9929,
            0.9840,
        ),
        model(
            "manenica-body-pull",
            "Manenica (body pull)",
            BackHip,
            expo(27.6604, -4.2),
            unit,
            0.9901,
            0.6585,
        ),
        model(
            "manenica-body-torque",
            "Manenica (body torque)",
            BackHip,
            expo(12.4286, -4.3),
            unit,
            0.9911,
            0.9447,
        ),
        model(
            "manenica-back-muscles",
            "Manenica (back muscles)",
            BackHip,
            expo(32.7859, -4.9),
            unit,
            0.9957,
            0.7306,
        ),
        model(
            "rohmert-posture3",
            "Rohmert (posture 3)",
            BackHip,
            power(0.3001, -2.803),
            unit,
            0.9745,
            0.5353,
        ),
        model(
            "rohmert-posture4",
            "Rohmert (posture 4)",
            BackHip,
            power(1.2301, -1.308),
            unit,
            0.9989,
            0.7041,
        ),
        model(
            "rohmert-posture5",
            "Rohmert (posture 5)",
            BackHip,
            power(3.2613, -1.256),
            unit,
            0.9984,
            -0.057,
        ),
    ]
}

/// Immutable registry of the 24 static models, in publication order.
#[derive(Debug, Clone)]
pub struct MetBank {
    models: Vec<StaticMetModel>,
    huijgens: HuijgensVariant,
}

impl Default for MetBank {
    fn default() -> Self {
        Self::new(HuijgensVariant::default())
    }
}

impl MetBank {
    pub fn new(huijgens: HuijgensVariant) -> Self {
        Self {
            models: table(huijgens),
            huijgens,
        }
    }

    pub fn huijgens_variant(&self) -> HuijgensVariant {
        self.huijgens
    }

    pub fn models(&self) -> &[StaticMetModel] {
        &self.models
    }

    pub fn list(&self, group: Option<Group>) -> Vec<&StaticMetModel> {
        self.models
            .iter()
            .filter(|m| group.is_none_or(|g| m.group == g))
            .collect()
    }

    /// Like [`MetBank::list`] but takes the group by name.
    pub fn list_by_name(&self, group: Option<&str>) -> Result<Vec<&StaticMetModel>> {
        let group = group.map(str::parse).transpose()?;
        Ok(self.list(group))
    }

    pub fn get(&self, id: &str) -> Result<&StaticMetModel> {
        self.models
            .iter()
            .find(|m| m.id == id)
            .ok_or_else(|| Error::UnknownModel(id.to_string()))
    }

    pub fn ids(&self) -> Vec<&'static str> {
        self.models.iter().map(|m| m.id).collect()
    }
}

/// Result of sampling a model across its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityAudit {
    pub id: &'static str,
    pub strictly_decreasing: bool,
    /// First sampled `f` where MET failed to drop.
    pub first_violation: Option<f64>,
}

/// Samples `points` interior points of the model's domain and checks that
/// MET strictly decreases.
pub fn monotonicity_audit(model: &StaticMetModel, points: usize) -> MonotonicityAudit {
    let lo = model.domain.lower;
    let hi = model.domain.upper;
    let width = hi - lo;
    let mut previous = f64::INFINITY;
    let mut first_violation = None;
    for i in 1..=points {
        // interior points only, both ends excluded
        let f = lo + width * i as f64 / (points + 1) as f64;
        let value = model.formula.evaluate(f);
        if !(value < previous) {
            first_violation = Some(f);
            break;
        }
        previous = value;
    }
    MonotonicityAudit {
        id: model.id,
        strictly_decreasing: first_violation.is_none(),
        first_violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::collections::HashSet;

    fn nl(f: f64) -> NormalizedLoad {
        NormalizedLoad::new(f).unwrap()
    }

    #[test]
    fn registry_has_24_unique_models() {
        let bank = MetBank::default();
        assert_eq!(bank.models().len(), 24);
        let ids: HashSet<_> = bank.ids().into_iter().collect();
        assert_eq!(ids.len(), 24);
    }

    #[test]
    fn group_sizes() {
        let bank = MetBank::default();
        let sizes: Vec<usize> = Group::ALL
            .iter()
            .map(|g| bank.list(Some(*g)).len())
            .collect();
        assert_eq!(sizes, vec![7, 4, 6, 1, 6]);
        assert_eq!(bank.list(Some(Group::Hand))[0].author, "Manenica");
    }

    #[test]
    fn groups_by_name() {
        let bank = MetBank::default();
        assert_eq!(bank.list_by_name(None).unwrap().len(), 24);
        assert_eq!(bank.list_by_name(Some("shoulder")).unwrap().len(), 4);
        assert_eq!(bank.list_by_name(Some("back/hip")).unwrap().len(), 6);
        assert!(matches!(
            bank.list_by_name(Some("knee")),
            Err(Error::UnknownGroup(_))
        ));
    }

    #[test]
    fn spot_values() {
        let bank = MetBank::default();
        let eval = |id: &str, f: f64| static_met(bank.get(id).unwrap(), nl(f)).unwrap();
        assert_relative_eq!(eval("rohmert-general", 0.5), 1.1, max_relative = 1e-12);
        assert_relative_eq!(
            eval("sjogaard-general", 0.5),
            1.320_963_852_912_881_3,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            eval("manenica-hand", 0.5),
            1.750_670_580_050_110_3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn singular_boundaries_are_domain_errors() {
        let bank = MetBank::default();
        for (id, f) in [
            ("monod-scherrer", 0.14),
            ("monod-scherrer", 0.1),
            ("huijgens", 0.15),
            ("huijgens", 1.0),
        ] {
            match static_met(bank.get(id).unwrap(), nl(f)) {
                Err(Error::Domain(msg)) => assert!(msg.contains("boundary"), "{msg}"),
                other => panic!("{id} at {f}: {other:?}"),
            }
        }
        assert!(static_met(bank.get("monod-scherrer").unwrap(), nl(0.141)).is_ok());
    }

    #[test]
    fn unknown_model() {
        assert!(matches!(
            MetBank::default().get("nope"),
            Err(Error::UnknownModel(_))
        ));
    }

    #[test]
    fn default_models_are_monotone() {
        for m in MetBank::default().models() {
            let audit = monotonicity_audit(m, 100);
            assert!(
                audit.strictly_decreasing,
                "{} rises at {:?}",
                m.id, audit.first_violation
            );
        }
    }

    #[test]
    fn as_printed_huijgens_is_flagged() {
        let bank = MetBank::new(HuijgensVariant::AsPrinted);
        let audit = monotonicity_audit(bank.get("huijgens").unwrap(), 100);
        assert!(!audit.strictly_decreasing);
        let sign = MetBank::new(HuijgensVariant::SignCorrected);
        assert!(monotonicity_audit(sign.get("huijgens").unwrap(), 100).strictly_decreasing);
    }

    #[test]
    fn default_huijgens_tracks_rohmert_general() {
        // the reading the default variant is chosen by
        let bank = MetBank::default();
        let h = bank.get("huijgens").unwrap();
        let r = bank.get("rohmert-general").unwrap();
        for f in [0.3, 0.4, 0.5, 0.6, 0.7] {
            let ratio = static_met(h, nl(f)).unwrap() / static_met(r, nl(f)).unwrap();
            assert!((ratio - 1.0).abs() < 0.15, "f = {f}: ratio {ratio}");
        }
    }

    #[test]
    fn formula_text() {
        let bank = MetBank::default();
        assert_eq!(
            bank.get("rohmert-general").unwrap().formula.to_string(),
            "MET = -1.5 + 2.1/f - 0.6/f^2 + 0.1/f^3"
        );
        assert_eq!(
            bank.get("manenica-hand").unwrap().formula.to_string(),
            "MET = 16.6099 * exp(-4.5 * f)"
        );
        assert_eq!(
            bank.get("monod-scherrer").unwrap().domain.to_string(),
            "(0.14, 1]"
        );
        assert_eq!(
            bank.get("huijgens").unwrap().domain.to_string(),
            "(0.15, 1)"
        );
    }

    #[test]
    fn variant_parsing() {
        assert_eq!(
            "as-printed".parse::<HuijgensVariant>().unwrap(),
            HuijgensVariant::AsPrinted
        );
        assert!("other".parse::<HuijgensVariant>().is_err());
    }
}
