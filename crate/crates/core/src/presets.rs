//! The named parastatistics algebras, instantiated as [`AlgebraSpec`]s.
//!
//! Palev-type algebras are stored after rescaling the operators by the
//! square root of the vacuum eigenvalue, so every preset shares the vacuum
//! condition `a_i a+_j |0> = d_ij |0>`.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::algebra::{AlgebraSpec, LevelFn, DEFAULT_MAX_N};
use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::rational::{display_rational, int, rat, Rational};

/// Which level function replaces the Palev coefficient in the
/// `f(N) (d_ij -+ a+_j a_i)` family.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum FVariant {
    /// `f(n) = 1 - n/p`
    Affine,
    /// `f(n) = 1` for `n < p`, else `0`
    Step,
}

impl FromStr for FVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "affine" => Ok(FVariant::Affine),
            "step" => Ok(FVariant::Step),
            _ => Err(Error::InvalidParameter(format!("unknown variant {s:?}"))),
        }
    }
}

impl fmt::Display for FVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FVariant::Affine => "affine",
            FVariant::Step => "step",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PresetId {
    GreenParabose {
        p: u32,
    },
    GreenParafermi {
        p: u32,
    },
    /// `sign` is the `lambda = +-1` of the paraquantization.
    Govorkov {
        p: u32,
        sign: i8,
    },
    Quon {
        q: Rational,
    },
    PalevFermi {
        p: u32,
    },
    PalevBose {
        p: u32,
    },
    PalevFermiF {
        p: u32,
        variant: FVariant,
    },
    PalevBoseF {
        p: u32,
        variant: FVariant,
    },
    KleinMarshalek,
    PalevSuper {
        mb: usize,
        mf: usize,
        p: u32,
    },
    Okubo {
        p: u32,
    },
}

/// Stable CLI names.
pub const PRESET_NAMES: &[&str] = &[
    "green-parabose",
    "green-parafermi",
    "govorkov",
    "quon",
    "palev-fermi",
    "palev-bose",
    "palev-fermi-f",
    "palev-bose-f",
    "klein-marshalek",
    "palev-super",
    "okubo",
];

/// Raw parameters as they arrive from the command line.
#[derive(Clone, Debug, Default)]
pub struct PresetParams {
    pub p: Option<u32>,
    pub q: Option<Rational>,
    pub sign: Option<i8>,
    pub mb: Option<usize>,
    pub mf: Option<usize>,
    pub variant: Option<FVariant>,
}

impl PresetId {
    pub fn parse(name: &str, params: &PresetParams) -> Result<Self> {
        let need_p = || {
            params
                .p
                .ok_or_else(|| Error::InvalidParameter(format!("preset {name} needs --p")))
        };
        let id = match name.replace('_', "-").as_str() {
            "green-parabose" => PresetId::GreenParabose { p: need_p()? },
            "green-parafermi" => PresetId::GreenParafermi { p: need_p()? },
            "govorkov" => PresetId::Govorkov {
                p: need_p()?,
                sign: params
                    .sign
                    .ok_or_else(|| Error::InvalidParameter("govorkov needs --sign".into()))?,
            },
            "quon" => PresetId::Quon {
                q: params
                    .q
                    .clone()
                    .ok_or_else(|| Error::InvalidParameter("quon needs --q".into()))?,
            },
            "palev-fermi" => PresetId::PalevFermi { p: need_p()? },
            "palev-bose" => PresetId::PalevBose { p: need_p()? },
            "palev-fermi-f" => PresetId::PalevFermiF {
                p: need_p()?,
                variant: params.variant.unwrap_or(FVariant::Affine),
            },
            "palev-bose-f" => PresetId::PalevBoseF {
                p: need_p()?,
                variant: params.variant.unwrap_or(FVariant::Affine),
            },
            "klein-marshalek" => PresetId::KleinMarshalek,
            "palev-super" => PresetId::PalevSuper {
                mb: params
                    .mb
                    .ok_or_else(|| Error::InvalidParameter("palev-super needs --mb".into()))?,
                mf: params
                    .mf
                    .ok_or_else(|| Error::InvalidParameter("palev-super needs --mf".into()))?,
                p: need_p()?,
            },
            "okubo" | "okubo-fermi" => PresetId::Okubo { p: need_p()? },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown preset {other:?}; expected one of {}",
                    PRESET_NAMES.join(", ")
                )))
            }
        };
        id.validate()?;
        Ok(id)
    }

    pub fn name(&self) -> &'static str {
        match self {
            PresetId::GreenParabose { .. } => "green-parabose",
            PresetId::GreenParafermi { .. } => "green-parafermi",
            PresetId::Govorkov { .. } => "govorkov",
            PresetId::Quon { .. } => "quon",
            PresetId::PalevFermi { .. } => "palev-fermi",
            PresetId::PalevBose { .. } => "palev-bose",
            PresetId::PalevFermiF { .. } => "palev-fermi-f",
            PresetId::PalevBoseF { .. } => "palev-bose-f",
            PresetId::KleinMarshalek => "klein-marshalek",
            PresetId::PalevSuper { .. } => "palev-super",
            PresetId::Okubo { .. } => "okubo",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |p: u32| {
            if p == 0 {
                Err(Error::InvalidParameter(
                    "p must be a positive integer".into(),
                ))
            } else {
                Ok(())
            }
        };
        match self {
            PresetId::GreenParabose { p }
            | PresetId::GreenParafermi { p }
            | PresetId::PalevFermi { p }
            | PresetId::PalevBose { p }
            | PresetId::PalevFermiF { p, .. }
            | PresetId::PalevBoseF { p, .. }
            | PresetId::Okubo { p } => positive(*p),
            PresetId::Govorkov { p, sign } => {
                positive(*p)?;
                if *sign != 1 && *sign != -1 {
                    return Err(Error::InvalidParameter("sign must be +1 or -1".into()));
                }
                Ok(())
            }
            PresetId::PalevSuper { mb, mf, p } => {
                positive(*p)?;
                if mb + mf == 0 {
                    return Err(Error::InvalidParameter(
                        "palev-super needs at least one mode".into(),
                    ));
                }
                Ok(())
            }
            PresetId::Quon { .. } | PresetId::KleinMarshalek => Ok(()),
        }
    }

    /// Mode count forced by the preset itself (only the graded one).
    pub fn fixed_modes(&self) -> Option<usize> {
        match self {
            PresetId::PalevSuper { mb, mf, .. } => Some(mb + mf),
            _ => None,
        }
    }

    /// Preset whose negative-norm states are expected.
    pub fn indefinite_by_design(&self) -> bool {
        matches!(self, PresetId::Okubo { .. })
    }

    /// Builds the algebra on `modes` modes with the default `max_n`.
    pub fn build(&self, modes: usize) -> Result<AlgebraSpec> {
        self.validate()?;
        if modes == 0 {
            return Err(Error::InvalidParameter(
                "at least one mode is required".into(),
            ));
        }
        if let Some(m) = self.fixed_modes() {
            if m != modes {
                return Err(Error::InvalidParameter(format!(
                    "palev-super fixes M = mb + mf = {m}, got {modes}"
                )));
            }
        }
        let p_inv = |p: u32| rat(1, p as i64);
        let one_minus = |slope: Rational| LevelFn::Affine(int(1), -slope);
        let zero = Rational::zero();
        match self {
            PresetId::GreenParabose { p } => AlgebraSpec::uniform(
                modes,
                LevelFn::one(),
                LevelFn::one(),
                int(-1),
                p_inv(*p) * int(2),
                zero,
            ),
            PresetId::GreenParafermi { p } => AlgebraSpec::uniform(
                modes,
                LevelFn::one(),
                LevelFn::one(),
                int(1),
                -p_inv(*p) * int(2),
                zero,
            ),
            PresetId::Govorkov { p, sign } => AlgebraSpec::uniform(
                modes,
                LevelFn::one(),
                LevelFn::one(),
                zero.clone(),
                -p_inv(*p) * int(*sign as i64),
                zero,
            ),
            PresetId::Quon { q } => AlgebraSpec::uniform(
                modes,
                LevelFn::one(),
                LevelFn::one(),
                q.clone(),
                zero.clone(),
                zero,
            ),
            PresetId::PalevFermi { p } => AlgebraSpec::uniform(
                modes,
                one_minus(p_inv(*p)),
                LevelFn::one(),
                int(-1),
                p_inv(*p),
                zero,
            ),
            PresetId::PalevBose { p } => AlgebraSpec::uniform(
                modes,
                one_minus(p_inv(*p)),
                LevelFn::one(),
                int(1),
                -p_inv(*p),
                zero,
            ),
            PresetId::PalevFermiF { p, variant } | PresetId::PalevBoseF { p, variant } => {
                let level = match variant {
                    FVariant::Affine => one_minus(p_inv(*p)),
                    FVariant::Step => LevelFn::Step(*p as u64),
                };
                let q = if matches!(self, PresetId::PalevFermiF { .. }) {
                    int(-1)
                } else {
                    int(1)
                };
                AlgebraSpec::uniform(modes, level.clone(), level, q, zero.clone(), zero)
            }
            PresetId::KleinMarshalek => AlgebraSpec::uniform(
                modes,
                one_minus(int(1)),
                LevelFn::one(),
                zero.clone(),
                zero.clone(),
                zero,
            ),
            PresetId::PalevSuper { mb, p, .. } => {
                let grades: Vec<u8> = (0..modes).map(|k| u8::from(k >= *mb)).collect();
                let parity = |r: usize, c: usize| {
                    if grades[r] == 1 && grades[c] == 1 {
                        int(-1)
                    } else {
                        int(1)
                    }
                };
                let q = RationalMatrix::from_fn(modes, modes, parity);
                let y = RationalMatrix::from_fn(modes, modes, |r, c| -parity(r, c) * p_inv(*p));
                AlgebraSpec::new(
                    modes,
                    grades.clone(),
                    one_minus(p_inv(*p)),
                    LevelFn::one(),
                    q,
                    y,
                    RationalMatrix::zeros(modes, modes),
                    DEFAULT_MAX_N,
                )
            }
            PresetId::Okubo { p } => AlgebraSpec::uniform(
                modes,
                one_minus(p_inv(*p) * int(2)),
                LevelFn::one(),
                int(-1),
                p_inv(*p) * int(2),
                -p_inv(*p) * int(2),
            ),
        }
    }

    /// `(x, y, z, q)` of the triple relation
    /// `[[a_i, a+_j]_q, a+_k] = x d_ij a+_k + y d_ik a+_j + z d_jk a+_i`
    /// for presets in the affine family, `None` otherwise.
    pub fn triple_coefficients(&self) -> Option<[Rational; 4]> {
        let p_inv = |p: u32| rat(1, p as i64);
        let zero = Rational::zero();
        Some(match self {
            PresetId::GreenParabose { p } => [zero.clone(), p_inv(*p) * int(2), zero, int(-1)],
            PresetId::GreenParafermi { p } => [zero.clone(), -p_inv(*p) * int(2), zero, int(1)],
            PresetId::Govorkov { p, sign } => [
                zero.clone(),
                -p_inv(*p) * int(*sign as i64),
                zero.clone(),
                zero,
            ],
            PresetId::Quon { q } => [zero.clone(), zero.clone(), zero, q.clone()],
            PresetId::PalevFermi { p } => [-p_inv(*p), p_inv(*p), zero, int(-1)],
            PresetId::PalevBose { p } => [-p_inv(*p), -p_inv(*p), zero, int(1)],
            PresetId::KleinMarshalek => [int(-1), zero.clone(), zero.clone(), zero],
            PresetId::Okubo { p } => [
                -p_inv(*p) * int(2),
                p_inv(*p) * int(2),
                -p_inv(*p) * int(2),
                int(-1),
            ],
            PresetId::PalevFermiF { .. }
            | PresetId::PalevBoseF { .. }
            | PresetId::PalevSuper { .. } => return None,
        })
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.name();
        match self {
            PresetId::GreenParabose { p }
            | PresetId::GreenParafermi { p }
            | PresetId::PalevFermi { p }
            | PresetId::PalevBose { p }
            | PresetId::Okubo { p } => write!(f, "{name}(p={p})"),
            PresetId::Govorkov { p, sign } => write!(f, "{name}(p={p},sign={sign:+})"),
            PresetId::Quon { q } => write!(f, "{name}(q={})", display_rational(q)),
            PresetId::PalevFermiF { p, variant } | PresetId::PalevBoseF { p, variant } => {
                write!(f, "{name}(p={p},variant={variant})")
            }
            PresetId::KleinMarshalek => write!(f, "{name}"),
            PresetId::PalevSuper { mb, mf, p } => write!(f, "{name}(mb={mb},mf={mf},p={p})"),
        }
    }
}
