//! Serde helpers writing big integers as decimal strings.

use std::collections::BTreeMap;

use num::BigUint;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
    let text = String::deserialize(d)?;
    BigUint::parse_bytes(text.as_bytes(), 10)
        .ok_or_else(|| D::Error::custom(format!("not a decimal integer: {:?}", text)))
}

pub mod map {
    use super::*;
    use serde::ser::SerializeMap;

    pub fn serialize<S, K>(m: &BTreeMap<K, BigUint>, s: S) -> Result<S::Ok, S::Error>
    where
        S: Serializer,
        K: serde::Serialize,
    {
        let mut out = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            out.serialize_entry(k, &v.to_str_radix(10))?;
        }
        out.end()
    }
}
