use super::{Bound, Series1, SeriesError, SeriesM};
use crate::rational::{parse_rational, to_fraction_string, Rational};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// Canonical serialized form shared by both series types.
///
/// Coefficients are `"num/den"` strings so the encoding is bit-exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub vars: Vec<String>,
    pub bound: BoundJson,
    pub terms: Vec<(Vec<u32>, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundJson {
    Order(usize),
    Total(u32),
    PerVariable(Vec<u32>),
}

impl From<&Series1> for SeriesJson {
    fn from(s: &Series1) -> Self {
        let terms = s
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| (vec![n as u32], to_fraction_string(c)))
            .collect();
        SeriesJson {
            vars: vec![s.var().to_string()],
            bound: BoundJson::Order(s.order()),
            terms,
        }
    }
}

impl From<&SeriesM> for SeriesJson {
    fn from(s: &SeriesM) -> Self {
        let bound = match s.bound() {
            Bound::Total(d) => BoundJson::Total(*d),
            Bound::PerVariable(b) => BoundJson::PerVariable(b.clone()),
        };
        SeriesJson {
            vars: s.vars().to_vec(),
            bound,
            terms: s
                .terms()
                .iter()
                .map(|(e, c)| (e.clone(), to_fraction_string(c)))
                .collect(),
        }
    }
}

fn coefficient(text: &str) -> Result<Rational, SeriesError> {
    parse_rational(text).ok_or_else(|| SeriesError::Malformed(format!("bad coefficient {text:?}")))
}

impl SeriesJson {
    pub fn to_series1(&self) -> Result<Series1, SeriesError> {
        let BoundJson::Order(order) = self.bound else {
            return Err(SeriesError::Malformed("univariate series needs an order bound".into()));
        };
        if self.vars.len() != 1 {
            return Err(SeriesError::Malformed("univariate series needs one variable".into()));
        }
        let mut s = Series1::zero(&self.vars[0], order);
        let mut coeffs = s.coeffs().to_vec();
        for (e, c) in &self.terms {
            let n = match e.as_slice() {
                [n] if (*n as usize) < order => *n as usize,
                _ => return Err(SeriesError::OutsideBound(e.clone())),
            };
            coeffs[n] = coefficient(c)?;
        }
        s = Series1::from_coeffs(&self.vars[0], coeffs);
        Ok(s)
    }

    pub fn to_series_m(&self) -> Result<SeriesM, SeriesError> {
        let bound = match &self.bound {
            BoundJson::Total(d) => Bound::Total(*d),
            BoundJson::PerVariable(b) => Bound::PerVariable(b.clone()),
            BoundJson::Order(_) => {
                return Err(SeriesError::Malformed("multivariate series needs a total or per-variable bound".into()))
            }
        };
        let vars: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        let mut s = SeriesM::zero(&vars, bound);
        for (e, c) in &self.terms {
            s.insert_checked(e.clone(), coefficient(c)?)?;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn univariate_round_trip() {
        let s = Series1::from_coeffs("z", vec![rat(1, 1), rat(0, 1), rat(-3, 7)]);
        let j = SeriesJson::from(&s);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"-3/7\""));
        let back: SeriesJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_series1().unwrap(), s);
    }

    #[test]
    fn multivariate_round_trip() {
        let mut s = SeriesM::zero(&["a", "b"], Bound::PerVariable(vec![2, 3]));
        s.add_term(vec![1, 3], rat(5, 2));
        let j = SeriesJson::from(&s);
        let back: SeriesJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        assert_eq!(back.to_series_m().unwrap(), s);
    }
}
