//! Small numeric helpers shared across modules.

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Relative-plus-absolute comparison used by certificate checks.
pub fn le_tol(value: f64, bound: f64) -> bool {
    value <= bound * (1.0 + 1e-9) + 1e-12
}

/// Serde for `f64` that keeps infinities: finite values are numbers,
/// non-finite ones the strings `"inf"`, `"-inf"` and `"nan"`.
pub mod ext_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&to_text(*x))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ext::deserialize(d).map(|e| e.0)
    }

    pub(crate) fn to_text(x: f64) -> String {
        if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    }

    /// Newtype for use inside containers.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Ext(pub f64);

    impl serde::Serialize for Ext {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize(&self.0, s)
        }
    }

    impl<'de> Deserialize<'de> for Ext {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            #[derive(Deserialize)]
            #[serde(untagged)]
            enum Raw {
                Num(f64),
                Text(String),
            }
            match Raw::deserialize(d)? {
                Raw::Num(x) => Ok(Ext(x)),
                Raw::Text(t) => t
                    .parse::<f64>()
                    .map(Ext)
                    .map_err(|_| serde::de::Error::custom(format!("invalid number {t:?}"))),
            }
        }
    }
}

/// [`ext_f64`] for string-keyed maps.
pub mod ext_f64_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::ext_f64::Ext;

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        let view: BTreeMap<&str, Ext> = m.iter().map(|(k, v)| (k.as_str(), Ext(*v))).collect();
        view.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        let raw = BTreeMap::<String, Ext>::deserialize(d)?;
        Ok(raw.into_iter().map(|(k, v)| (k, v.0)).collect())
    }
}
