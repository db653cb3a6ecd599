//! Named parameter sets used throughout the experiments.
//!
//! `m1` and `m2` are jump diffusions whose jump mode sits far from the
//! diffusion mode, `m3` is a low-activity tempered-stable model, `m4` is a
//! square-root variance model with violent vol-of-vol. The remaining
//! entries are standard literature test cases for the same three model
//! families at benign parameters.

use cospricer_core::models::{MarketContext, ModelSpec};

/// A model together with the market it is quoted in.
#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub model: ModelSpec,
    pub s0: f64,
    pub r: f64,
    pub t: f64,
    pub strike: f64,
}

impl CatalogEntry {
    pub fn ctx(&self) -> MarketContext {
        MarketContext::new(self.s0, self.r, self.t).expect("catalog markets are valid")
    }
}

pub const NAMES: &[&str] = &[
    "m1",
    "m2",
    "m3",
    "m4",
    "heston_t1",
    "heston_t10",
    "vg_t0.1",
    "vg_t1",
    "cgmy_y0.5",
    "cgmy_y1.5",
    "cgmy_y1.98",
];

/// Looks up a named parameter set; `None` for unknown names.
pub fn resolve(name: &str) -> Option<CatalogEntry> {
    let at_the_money = |model: ModelSpec, t: f64| CatalogEntry {
        model,
        s0: 100.0,
        r: 0.0,
        t,
        strike: 100.0,
    };
    let entry = match name {
        "m1" => at_the_money(ModelSpec::merton_jump(0.1, 0.001, -0.5, 0.2).unwrap(), 0.1),
        "m2" => at_the_money(
            ModelSpec::merton_jump(0.1, 1e-5, (-6.98f64).exp() - 1.0, 0.2).unwrap(),
            0.01,
        ),
        "m3" => at_the_money(ModelSpec::cgmy(0.005, 1.5, 1.5, 1.5).unwrap(), 0.1),
        "m4" => at_the_money(ModelSpec::heston(1.0, 0.05, 2.0, 0.01, -0.75).unwrap(), 0.5),
        "heston_t1" | "heston_t10" => CatalogEntry {
            model: ModelSpec::heston(1.5768, 0.0398, 0.5751, 0.0175, -0.5711).unwrap(),
            s0: 100.0,
            r: 0.0,
            t: if name == "heston_t1" { 1.0 } else { 10.0 },
            strike: 100.0,
        },
        "vg_t0.1" | "vg_t1" => CatalogEntry {
            model: ModelSpec::variance_gamma(0.12, -0.14, 0.2).unwrap(),
            s0: 100.0,
            r: 0.1,
            t: if name == "vg_t0.1" { 0.1 } else { 1.0 },
            strike: 90.0,
        },
        "cgmy_y0.5" => literature_cgmy(0.5),
        "cgmy_y1.5" => literature_cgmy(1.5),
        "cgmy_y1.98" => literature_cgmy(1.98),
        _ => return None,
    };
    Some(entry)
}

fn literature_cgmy(y: f64) -> CatalogEntry {
    CatalogEntry {
        model: ModelSpec::cgmy(1.0, 5.0, 5.0, y).unwrap(),
        s0: 100.0,
        r: 0.1,
        t: 1.0,
        strike: 100.0,
    }
}
