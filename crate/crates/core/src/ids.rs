//! Identifier newtypes for the entities of an enterprise model.

use alloc::string::{String, ToString};
use core::fmt;

use serde::{Deserialize, Serialize};

macro_rules! symbol {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }

        impl core::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

symbol!(
    /// Goal task identifier, e.g. `t001`.
    TaskId
);
symbol!(
    /// Production line identifier, e.g. `l001`.
    LineId
);
symbol!(
    /// Vehicle identifier, e.g. `c001`.
    VehicleId
);
symbol!(
    /// Product identifier, e.g. `p001`.
    ProductId
);
symbol!(
    /// Raw material identifier, e.g. `m001`.
    MaterialId
);
symbol!(
    /// Consumable utility such as water, electricity or steam.
    UtilityId
);
symbol!(
    /// Site or assembly point, e.g. `a1` or `b1`.
    Location
);
