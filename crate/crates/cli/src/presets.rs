//! Parameter studies behind each figure, one scenario file per curve.
//!
//! The figures do not list every legend parameter. Where the number of
//! relays or the correlation is not given, two relays (the case with the
//! largest gain over a single relay) and ρ ∈ {0.1, 0.5, 0.9} are used.

use rfso_core::analytic::SeriesControl;
use rfso_core::channel::FsoGeometry;
use rfso_core::presets::{self, Turbulence, SCATTERING, TURBULENCE};

use crate::run::MethodChoice;
use crate::scenario::{Rank, ScenarioFile};
use crate::sweep::{SweepSpec, SweepVar};

pub const PRESET_NAMES: [&str; 6] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub title: &'static str,
    pub files: Vec<ScenarioFile>,
    pub methods: Vec<MethodChoice>,
}

struct Curve<'a> {
    turbulence: &'a Turbulence,
    jitter: f64,
    relays: u32,
    rank: Rank,
    rho: f64,
    mu1_db: f64,
    mu2_db: f64,
}

impl Curve<'_> {
    fn file(&self, id: String, sweep: SweepSpec) -> ScenarioFile {
        let t = self.turbulence;
        ScenarioFile {
            id,
            gamma_th_db: 10.0 * presets::GAMMA_TH.log10(),
            mu1_db: self.mu1_db,
            rho: self.rho,
            relays: self.relays,
            rank: self.rank,
            mu2_db: self.mu2_db,
            malaga: presets::malaga(t),
            geometry: FsoGeometry {
                cn2: t.cn2,
                ..presets::GEOMETRY
            },
            pointing: presets::pointing(self.jitter),
            series: SeriesControl::default(),
            sweeps: vec![sweep],
        }
    }
}

fn sweep(var: SweepVar, start: f64, stop: f64, step: f64) -> SweepSpec {
    SweepSpec {
        var,
        start,
        stop,
        step,
    }
}

fn rho_tag(rho: f64) -> String {
    format!("rho{rho}")
}

pub fn preset(name: &str) -> Option<Preset> {
    use MethodChoice::*;
    let mut files = Vec::new();
    let (title, methods) = match name {
        "fig2" => {
            for t in &SCATTERING {
                for (rank, tag) in [(Rank::Best, "best"), (Rank::Index(1), "worst")] {
                    let c = Curve {
                        turbulence: t,
                        jitter: 1.0,
                        relays: 3,
                        rank,
                        rho: 0.9,
                        mu1_db: 30.0,
                        mu2_db: 30.0,
                    };
                    files.push(c.file(
                        format!("fig2-{}-{tag}", t.name),
                        sweep(SweepVar::Mu1EqMu2Db, 0.0, 40.0, 5.0),
                    ));
                }
            }
            ("outage vs mu1 = mu2, best and worst of three relays", vec![Exact, Mc, FloorMu2])
        }
        "fig3" | "fig4" => {
            let sets: &[Turbulence] = if name == "fig3" {
                &[SCATTERING[0], SCATTERING[2]]
            } else {
                &TURBULENCE
            };
            for t in sets {
                for rho in [0.1, 0.5, 0.9] {
                    let c = Curve {
                        turbulence: t,
                        jitter: 1.0,
                        relays: 2,
                        rank: Rank::Best,
                        rho,
                        mu1_db: 30.0,
                        mu2_db: 20.0,
                    };
                    files.push(c.file(
                        format!("{name}-{}-{}", t.name, rho_tag(rho)),
                        sweep(SweepVar::Mu1Db, 0.0, 60.0, 5.0),
                    ));
                }
            }
            if name == "fig3" {
                ("outage vs mu1 for several rho and rho_M", vec![Exact, Mc, FloorMu1])
            } else {
                (
                    "outage vs mu1 for several rho, weak and strong turbulence",
                    vec![Exact, Mc, FloorMu1App, FloorMu1],
                )
            }
        }
        "fig5" => {
            for jitter in [1.0, 5.0, 6.0] {
                for rho in [0.5, 0.9] {
                    let c = Curve {
                        turbulence: &SCATTERING[1],
                        jitter,
                        relays: 2,
                        rank: Rank::Best,
                        rho,
                        // a high floor, so the jitter curves visibly merge
                        mu1_db: 10.0,
                        mu2_db: 30.0,
                    };
                    files.push(c.file(
                        format!("fig5-jitter{jitter}-{}", rho_tag(rho)),
                        sweep(SweepVar::Mu2Db, 0.0, 80.0, 5.0),
                    ));
                }
            }
            ("outage vs mu2 for several rho and jitter strengths", vec![Exact, Mc, FloorMu2])
        }
        "fig6" => {
            for t in &TURBULENCE {
                for rho in [0.1, 0.9] {
                    let c = Curve {
                        turbulence: t,
                        jitter: 1.0,
                        relays: 2,
                        rank: Rank::Best,
                        rho,
                        mu1_db: 30.0,
                        mu2_db: 30.0,
                    };
                    let a = presets::APERTURE;
                    files.push(c.file(
                        format!("fig6-{}-{}", t.name, rho_tag(rho)),
                        sweep(SweepVar::SigmaS, 0.5 * a, 6.0 * a, 0.5 * a),
                    ));
                }
            }
            ("outage vs jitter standard deviation", vec![Exact, Mc])
        }
        "fig7" => {
            for (t, jitter, tag) in [
                (&TURBULENCE[0], 1.0, "weak"),
                (&TURBULENCE[1], 1.0, "strong"),
                (&TURBULENCE[0], 6.0, "weak-jitter6"),
            ] {
                let c = Curve {
                    turbulence: t,
                    jitter,
                    relays: 1,
                    rank: Rank::Best,
                    rho: 0.9,
                    mu1_db: 20.0,
                    mu2_db: 20.0,
                };
                files.push(c.file(format!("fig7-{tag}"), sweep(SweepVar::Relays, 1.0, 5.0, 1.0)));
            }
            ("outage vs number of relays, best relay selected", vec![Exact, Mc])
        }
        _ => return None,
    };
    Some(Preset {
        name: PRESET_NAMES.iter().find(|n| **n == name)?,
        title,
        files,
        methods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse;

    #[test]
    fn every_preset_is_valid() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            assert!(!p.files.is_empty());
            for f in &p.files {
                let loaded = parse(&f.emit(), name, "x").unwrap();
                assert_eq!(&loaded.file, f);
                assert!(loaded.warnings.is_empty());
                assert!(f.id.starts_with(name));
            }
        }
        assert!(preset("fig8").is_none());
    }
}
