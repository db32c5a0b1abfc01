//! JSON form of a series: per component, an array of
//! `{"exp": [e1, ..., en], "re": "p/q", "im": "p/q"}` records in the
//! deterministic monomial order, with rationals as canonical reduced
//! fractions.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CoreError;
use crate::index::MultiIndex;
use crate::scalar::{rational_from_str, rational_to_string, Scalar};
use crate::series::Series;

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    num_vars: usize,
    num_components: usize,
    trunc_degree: usize,
    components: Vec<Vec<TermRepr>>,
}

fn to_repr(s: &Series) -> SeriesRepr {
    let mut components: Vec<Vec<TermRepr>> = vec![Vec::new(); s.num_components()];
    for (idx, coeffs) in s.terms() {
        for (j, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                components[j].push(TermRepr {
                    exp: idx.0.clone(),
                    re: rational_to_string(&c.re),
                    im: rational_to_string(&c.im),
                });
            }
        }
    }
    SeriesRepr {
        num_vars: s.num_vars(),
        num_components: s.num_components(),
        trunc_degree: s.trunc_degree(),
        components,
    }
}

fn from_repr(r: SeriesRepr) -> Result<Series, CoreError> {
    let mut s = Series::zero(r.num_vars, r.num_components, r.trunc_degree);
    for (j, comp) in r.components.iter().enumerate() {
        if j >= r.num_components {
            return Err(CoreError::DimensionMismatch(
                "more component arrays than declared components".into(),
            ));
        }
        for term in comp {
            if term.exp.len() != r.num_vars {
                return Err(CoreError::DimensionMismatch(
                    "exponent length does not match num_vars".into(),
                ));
            }
            let mut coeff = vec![Scalar::zero(); r.num_components];
            coeff[j] = Scalar::new(rational_from_str(&term.re)?, rational_from_str(&term.im)?);
            s.add_to_coeff(&MultiIndex(term.exp.clone()), &coeff);
        }
    }
    Ok(s)
}

impl Serialize for Series {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        to_repr(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        from_repr(repr).map_err(DeError::custom)
    }
}

pub fn series_to_json(s: &Series) -> serde_json::Value {
    serde_json::to_value(s).expect("series serialization cannot fail")
}

pub fn series_from_json(v: &serde_json::Value) -> Result<Series, CoreError> {
    serde_json::from_value(v.clone())
        .map_err(|e| CoreError::Precondition(format!("bad series JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let d = 5;
        let z1 = Series::coordinate(2, 0, d);
        let z2 = Series::coordinate(2, 1, d);
        let f = Series::stack(&[
            z1.mul(&z2).scale(&Scalar::new(
                crate::scalar::Rational::new(3.into(), 4.into()),
                crate::scalar::Rational::new((-1).into(), 2.into()),
            )),
            z2.pow(3),
        ]);
        let json = series_to_json(&f);
        let back = series_from_json(&json).unwrap();
        assert_eq!(f, back);
    }
}
