use std::fmt;
use std::str::FromStr;

use formal_hs::exactnum::{FpElem, PrimeField};
use formal_hs::fgl::{FglError, FormalGroupLaw};

/// "additive[:p]", "multiplicative[:p]" or "honda:p:h"; p defaults to 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawDesc {
    Additive { p: u64 },
    Multiplicative { p: u64 },
    Honda { p: u64, h: u32 },
}

impl LawDesc {
    pub fn p(self) -> u64 {
        match self {
            LawDesc::Additive { p } | LawDesc::Multiplicative { p } | LawDesc::Honda { p, .. } => p,
        }
    }

    pub fn build(self, precision: usize) -> Result<FormalGroupLaw<FpElem>, FglError> {
        let field = PrimeField::new(self.p())?;
        match self {
            LawDesc::Additive { .. } => FormalGroupLaw::additive(field, precision),
            LawDesc::Multiplicative { .. } => FormalGroupLaw::multiplicative(field, precision),
            LawDesc::Honda { p, h } => FormalGroupLaw::honda(p, h, precision),
        }
    }
}

impl FromStr for LawDesc {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let prime = |t: &str| -> Result<u64, String> {
            let p: u64 = t.parse().map_err(|_| format!("bad prime {t:?} in {s:?}"))?;
            PrimeField::new(p).map_err(|e| format!("{e} in {s:?}"))?;
            Ok(p)
        };
        match parts.as_slice() {
            ["additive"] => Ok(LawDesc::Additive { p: 2 }),
            ["additive", p] => Ok(LawDesc::Additive { p: prime(p)? }),
            ["multiplicative"] => Ok(LawDesc::Multiplicative { p: 2 }),
            ["multiplicative", p] => Ok(LawDesc::Multiplicative { p: prime(p)? }),
            ["honda", p, h] => {
                let p = prime(p)?;
                let h: u32 = h.parse().map_err(|_| format!("bad height {h:?} in {s:?}"))?;
                if h == 0 {
                    return Err(format!("height must be at least 1 in {s:?}"));
                }
                Ok(LawDesc::Honda { p, h })
            }
            _ => Err(format!(
                "unknown law {s:?}; expected additive[:p], multiplicative[:p] or honda:p:h"
            )),
        }
    }
}

impl fmt::Display for LawDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LawDesc::Additive { p } => write!(f, "additive:{p}"),
            LawDesc::Multiplicative { p } => write!(f, "multiplicative:{p}"),
            LawDesc::Honda { p, h } => write!(f, "honda:{p}:{h}"),
        }
    }
}
