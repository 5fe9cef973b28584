//! Serde helpers encoding integers as decimal strings.
//!
//! Certificates are consumed by tooling in other ecosystems where 64-bit
//! integers do not survive a trip through a double.  Every integer field in
//! the wire format therefore serializes as a decimal string, via
//! `#[serde(with = "numstr::u64str")]` and friends.

macro_rules! numstr_impl {
    ($mod_name:ident, $ty:ty) => {
        pub mod $mod_name {
            use serde::de::Error;
            use serde::{Deserialize, Deserializer, Serializer};

            pub fn serialize<S: Serializer>(v: &$ty, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&v.to_string())
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<$ty, D::Error> {
                let raw = String::deserialize(d)?;
                raw.parse::<$ty>().map_err(|_| {
                    D::Error::custom(format!(
                        "expected a decimal {} string, got {raw:?}",
                        stringify!($ty)
                    ))
                })
            }
        }
    };
}

numstr_impl!(u64str, u64);
numstr_impl!(i64str, i64);
numstr_impl!(u32str, u32);
