//! Published codimension-three points of the three-dimensional normal form,
//! each given with ten decimals.

use crate::map::BcnfParams;
use crate::symbolic::Word;

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub params: BcnfParams,
    pub x: &'static str,
    pub y: &'static str,
}

impl Preset {
    pub fn words(&self) -> (Word, Word) {
        (
            self.x.parse().expect("valid word"),
            self.y.parse().expect("valid word"),
        )
    }
}

pub fn rllr_llr() -> Preset {
    Preset {
        name: "RLLR/LLR",
        params: BcnfParams {
            tau_l: 1.1770635074,
            sigma_l: 1.0,
            delta_l: 0.4334058651,
            tau_r: -1.0170722063,
            sigma_r: 0.5,
            delta_r: 1.0,
            mu: 1.0,
        },
        x: "RLLR",
        y: "LLR",
    }
}

pub fn rlr_ll() -> Preset {
    Preset {
        name: "RLR/LL",
        params: BcnfParams {
            tau_l: -1.9465556255,
            sigma_l: -1.0,
            delta_l: 0.3387541740,
            tau_r: -0.3249411658,
            sigma_r: 1.0,
            delta_r: 0.9,
            mu: 1.0,
        },
        x: "RLR",
        y: "LL",
    }
}

pub fn rlrlrrlr_lrrlr() -> Preset {
    Preset {
        name: "RLRLRRLR/LRRLR",
        params: BcnfParams {
            tau_l: -0.5298581051,
            sigma_l: 0.5,
            delta_l: -0.2220122186,
            tau_r: -3.4893057804,
            sigma_r: 1.6,
            delta_r: 0.6,
            mu: 1.0,
        },
        x: "RLRLRRLR",
        y: "LRRLR",
    }
}

pub fn all() -> [Preset; 3] {
    [rllr_llr(), rlr_ll(), rlrlrrlr_lrrlr()]
}
