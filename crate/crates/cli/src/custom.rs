//! User-supplied spectral sequences read from JSON.

use std::collections::BTreeMap;

use serde::Deserialize;
use syntomic_core::engine::{DifferentialRule, DifferentialShift, SpectralSequence};
use syntomic_core::{AlgebraPresentation, Element, GeneratorSpec, Window};

use crate::Failure;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Definition {
    pub p: u32,
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub rules: Vec<RuleDef>,
    #[serde(default = "bockstein")]
    pub shift: ShiftDef,
    #[serde(default)]
    pub window: Option<Window>,
    #[serde(default)]
    pub r_max: Option<u32>,
}

fn bockstein() -> ShiftDef {
    ShiftDef::Named("bockstein".into())
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ShiftDef {
    Named(String),
    Custom(DifferentialShift),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDef {
    pub page: u32,
    pub matcher: Matcher,
    pub image: Vec<Term>,
}

/// `d(generator^unit) = image`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Matcher {
    pub generator: String,
    #[serde(default = "one")]
    pub unit: i64,
}

fn one() -> i64 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    #[serde(default = "one")]
    pub coeff: i64,
    #[serde(default)]
    pub monomial: BTreeMap<String, i64>,
}

pub fn parse(text: &str) -> Result<Definition, Failure> {
    serde_json::from_str(text).map_err(|e| {
        Failure::config(format!("PARSE_ERROR at line {} column {}: {e}", e.line(), e.column()))
    })
}

impl Definition {
    pub fn build(&self) -> Result<SpectralSequence, Failure> {
        let shift = match &self.shift {
            ShiftDef::Named(s) if s == "bockstein" => DifferentialShift::bockstein(),
            ShiftDef::Named(s) if s == "motivic" => DifferentialShift::motivic(),
            ShiftDef::Named(s) => {
                return Err(Failure::config(format!("PARSE_ERROR: unknown shift {s:?}; use bockstein, motivic or an object")))
            }
            ShiftDef::Custom(s) => *s,
        };
        let alg = AlgebraPresentation::new(self.p, self.generators.clone()).map_err(Failure::from_display)?;
        let mut pages: BTreeMap<u32, DifferentialRule> = BTreeMap::new();
        for (i, def) in self.rules.iter().enumerate() {
            let generator = alg
                .index_of(&def.matcher.generator)
                .map_err(|e| Failure::config(format!("PARSE_ERROR in rules[{i}].matcher: {e}")))?;
            let mut image = Element::zero();
            for (j, term) in def.image.iter().enumerate() {
                let factors: Vec<(&str, i64)> = term.monomial.iter().map(|(k, &v)| (k.as_str(), v)).collect();
                let m = alg
                    .monomial(&factors)
                    .map_err(|e| Failure::config(format!("PARSE_ERROR in rules[{i}].image[{j}]: {e}")))?;
                image.add_term(m, term.coeff, self.p);
            }
            let rule = pages.remove(&def.page).unwrap_or_else(|| DifferentialRule::new(def.page));
            pages.insert(def.page, rule.with_action(generator, def.matcher.unit, image));
        }
        let r_max = self.r_max.unwrap_or_else(|| pages.keys().copied().max().unwrap_or(1));
        let mut ss = SpectralSequence::new(alg, shift, r_max);
        for rule in pages.into_values() {
            ss.add_rule(rule).map_err(Failure::from_engine)?;
        }
        Ok(ss)
    }
}
