//! JSON run configuration: strict parsing (unknown keys rejected), conversion
//! into core types, and the built-in preset catalog.

use anyhow::{anyhow, bail, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use nls_core::painleve::{CoefficientF, SingularManifold};
use nls_core::solutions::{
    d_transformed_soliton, gaussian_packet, standing_soliton_with_coupling, travelling_soliton,
    SolitonParams, SolutionFamily,
};
use nls_core::solver::SolverConfig;
use nls_core::transforms::{
    accelerated_frame, d_map, dilatation, expansion, identity, niederer_map, time_translation,
    SpacetimeTransform,
};
use nls_core::{EquationSpec, Grid1D};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Simulate,
    Transform,
    Verify,
    Painleve,
    Convergence,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub command: CommandKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equation: Option<EquationCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub painleve: Option<PainleveSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSection>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        if cfg.schema_version != SCHEMA_VERSION {
            bail!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            );
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCfg {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl GridCfg {
    pub fn build(&self) -> Result<Grid1D> {
        Ok(Grid1D::new(self.x_min, self.x_max, self.n_points)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverCfg {
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub record_every: usize,
}

impl SolverCfg {
    pub fn build(&self, grid: Grid1D, equation: EquationSpec) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            dt: self.dt,
            t_start: self.t_start,
            t_end: self.t_end,
            grid,
            equation,
            record_every: self.record_every,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Equation reference by label plus parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationCfg {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl EquationCfg {
    pub fn build(&self) -> Result<EquationSpec> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| anyhow!("equation '{}' needs parameter '{name}'", self.label))
        };
        Ok(match self.label.as_str() {
            "constant-nls" => EquationSpec::constant(need(self.coupling, "coupling")?),
            "free-linear" => EquationSpec::free_linear(),
            "time-decay-nls" => EquationSpec::reciprocal_time(),
            "linear-potential-nls" => EquationSpec::linear_potential(need(self.alpha, "alpha")?),
            "oscillator-nls" => EquationSpec::oscillator(need(self.omega, "omega")?),
            "linear-oscillator" => EquationSpec::linear_oscillator(need(self.omega, "omega")?),
            other => bail!("unknown equation label '{other}'"),
        })
    }
}

/// Initial-condition / solution-family descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCfg {
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl InitialCfg {
    pub fn build(&self) -> Result<SolutionFamily> {
        let x0 = self.x0.unwrap_or(0.0);
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| anyhow!("family '{}' needs parameter '{name}'", self.family))
        };
        Ok(match self.family.as_str() {
            "standing-soliton" => standing_soliton_with_coupling(x0, self.coupling.unwrap_or(1.0))?,
            "travelling-soliton" => travelling_soliton(SolitonParams::new(
                x0,
                need(self.k, "k")?,
                need(self.v, "v")?,
            )?)?,
            "d-transformed-soliton" => d_transformed_soliton(x0),
            "gaussian-packet" => gaussian_packet(),
            "accelerated-soliton" => {
                let alpha = need(self.alpha, "alpha")?;
                accelerated_frame(alpha).pull_back(&standing_soliton_with_coupling(x0, 2.0)?)
            }
            "oscillator-soliton" => {
                let omega = need(self.omega, "omega")?;
                niederer_map(omega)?.pull_back(&standing_soliton_with_coupling(x0, 1.0)?)
            }
            other => bail!("unknown solution family '{other}'"),
        })
    }
}

/// Transform descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformCfg {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl TransformCfg {
    pub fn build(&self) -> Result<SpacetimeTransform> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| anyhow!("transform '{}' needs parameter '{name}'", self.name))
        };
        Ok(match self.name.as_str() {
            "identity" => identity(),
            "dilatation" => dilatation(need(self.delta, "delta")?)?,
            "expansion" => expansion(need(self.kappa, "kappa")?),
            "time-translation" => time_translation(need(self.epsilon, "epsilon")?),
            "d-map" => d_map(),
            "accelerated-frame" => accelerated_frame(need(self.alpha, "alpha")?),
            "niederer" => niederer_map(need(self.omega, "omega")?)?,
            other => bail!("unknown transform '{other}'"),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSection {
    pub map: TransformCfg,
    /// Time (in the transformed frame) at which the output is sampled.
    pub sample_time: f64,
    /// Input field CSV; when absent the `initial` family is transformed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_csv: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesCfg {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl TimesCfg {
    pub fn build(&self) -> Result<Vec<f64>> {
        if self.count < 2
            || !self.end.is_finite()
            || !self.start.is_finite()
            || self.end <= self.start
        {
            bail!("times must span a nonempty interval with count >= 2");
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| self.start + i as f64 * step)
            .collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientCfg {
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ts: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fs: Option<Vec<f64>>,
}

impl CoefficientCfg {
    pub fn build(&self) -> Result<CoefficientF> {
        Ok(match self.family.as_str() {
            "reciprocal-linear" => CoefficientF::reciprocal_linear(
                self.a
                    .ok_or_else(|| anyhow!("reciprocal-linear needs 'a'"))?,
                self.b
                    .ok_or_else(|| anyhow!("reciprocal-linear needs 'b'"))?,
            ),
            "constant" => {
                CoefficientF::constant(self.c.ok_or_else(|| anyhow!("constant needs 'c'"))?)
            }
            "power" => CoefficientF::power(
                self.exponent
                    .ok_or_else(|| anyhow!("power needs 'exponent'"))?,
            ),
            "exponential" => CoefficientF::exponential(),
            "sin-plus" => CoefficientF::sin_plus(
                self.offset
                    .ok_or_else(|| anyhow!("sin-plus needs 'offset'"))?,
            ),
            "table" => {
                let ts = self
                    .ts
                    .as_ref()
                    .ok_or_else(|| anyhow!("table needs 'ts'"))?;
                let fs = self
                    .fs
                    .as_ref()
                    .ok_or_else(|| anyhow!("table needs 'fs'"))?;
                CoefficientF::from_table("user-table", ts, fs)?
            }
            other => bail!("unknown coefficient family '{other}'"),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldCfg {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl ManifoldCfg {
    pub fn build(&self) -> Result<SingularManifold> {
        let v = self.value.unwrap_or(1.0);
        Ok(match self.kind.as_str() {
            "constant" => SingularManifold::constant(v),
            "linear" => SingularManifold::linear(v),
            "quadratic" => SingularManifold::quadratic(v),
            other => bail!("unknown manifold kind '{other}'"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedVerdict {
    Passes,
    Fails,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCase {
    pub coefficient: CoefficientCfg,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<ExpectedVerdict>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PainleveSection {
    /// Single coefficient to test (exit code reflects the verdict) …
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<CoefficientCfg>,
    /// … or a sweep of cases with optional expected verdicts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepCase>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<TimesCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifold: Option<ManifoldCfg>,
    /// Free leading coefficient u0 as [re, im]; default [√2, 0].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u0: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    #[serde(default = "default_expected_order")]
    pub expected_order: f64,
    #[serde(default = "default_order_band")]
    pub order_band: f64,
}

fn default_expected_order() -> f64 {
    2.0
}

fn default_order_band() -> f64 {
    0.2
}

// ── presets ──────────────────────────────────────────────────────────────────

pub const PRESET_NAMES: [&str; 4] = [
    "time-decay-soliton",
    "linear-potential-soliton",
    "oscillator-soliton",
    "painleve-sweep",
];

/// Built-in configurations, one per reproduction scenario.
pub fn preset(name: &str, seed: u64) -> Result<RunConfig> {
    let base = RunConfig {
        schema_version: SCHEMA_VERSION,
        command: CommandKind::Simulate,
        output_dir: None,
        tolerance: None,
        seed: None,
        equation: None,
        grid: None,
        solver: None,
        initial: None,
        transform: None,
        verify: None,
        painleve: None,
        convergence: None,
    };
    Ok(match name {
        // Soliton of the time-decaying equation, evolved under F = 1/t.
        "time-decay-soliton" => RunConfig {
            equation: Some(EquationCfg {
                label: "time-decay-nls".into(),
                coupling: None,
                alpha: None,
                omega: None,
            }),
            grid: Some(GridCfg {
                x_min: -40.0,
                x_max: 40.0,
                n_points: 1024,
            }),
            solver: Some(SolverCfg {
                dt: 1e-3,
                t_start: 1.0,
                t_end: 2.0,
                record_every: 100,
            }),
            initial: Some(InitialCfg {
                family: "d-transformed-soliton".into(),
                x0: Some(0.0),
                k: None,
                v: None,
                coupling: None,
                alpha: None,
                omega: None,
            }),
            ..base
        },
        // Soliton in a uniform force field (accelerated-frame image).
        "linear-potential-soliton" => RunConfig {
            equation: Some(EquationCfg {
                label: "linear-potential-nls".into(),
                coupling: None,
                alpha: Some(0.3),
                omega: None,
            }),
            grid: Some(GridCfg {
                x_min: -20.0,
                x_max: 20.0,
                n_points: 512,
            }),
            solver: Some(SolverCfg {
                dt: 1e-3,
                t_start: 0.0,
                t_end: 1.0,
                record_every: 100,
            }),
            initial: Some(InitialCfg {
                family: "accelerated-soliton".into(),
                x0: Some(0.0),
                k: None,
                v: None,
                coupling: None,
                alpha: Some(0.3),
                omega: None,
            }),
            ..base
        },
        // Soliton of the oscillator equation (lens image of the standing one).
        "oscillator-soliton" => RunConfig {
            equation: Some(EquationCfg {
                label: "oscillator-nls".into(),
                coupling: None,
                alpha: None,
                omega: Some(1.0),
            }),
            grid: Some(GridCfg {
                x_min: -20.0,
                x_max: 20.0,
                n_points: 512,
            }),
            solver: Some(SolverCfg {
                dt: 1e-3,
                t_start: 0.0,
                t_end: 1.0,
                record_every: 100,
            }),
            initial: Some(InitialCfg {
                family: "oscillator-soliton".into(),
                x0: Some(0.0),
                k: None,
                v: None,
                coupling: None,
                alpha: None,
                omega: Some(1.0),
            }),
            ..base
        },
        // The integrability dichotomy: random reciprocal-linear coefficients
        // must pass, the named non-integrable families must fail.
        "painleve-sweep" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cases = Vec::new();
            for _ in 0..20 {
                let (a, b) = loop {
                    let a: f64 = rng.gen_range(-3.0..3.0);
                    let b: f64 = rng.gen_range(-1.5..1.5);
                    let ok = (0..12)
                        .map(|i| 0.1 + i as f64 * (1.9 / 11.0))
                        .all(|t| (a + b * t).abs() > 0.1);
                    if ok {
                        break (a, b);
                    }
                };
                cases.push(SweepCase {
                    coefficient: CoefficientCfg {
                        family: "reciprocal-linear".into(),
                        a: Some(a),
                        b: Some(b),
                        c: None,
                        exponent: None,
                        offset: None,
                        ts: None,
                        fs: None,
                    },
                    expect: Some(ExpectedVerdict::Passes),
                });
            }
            let fail_case = |family: &str, exponent: Option<i32>, offset: Option<f64>| SweepCase {
                coefficient: CoefficientCfg {
                    family: family.into(),
                    a: None,
                    b: None,
                    c: None,
                    exponent,
                    offset,
                    ts: None,
                    fs: None,
                },
                expect: Some(ExpectedVerdict::Fails),
            };
            cases.push(fail_case("power", Some(1), None));
            cases.push(fail_case("power", Some(2), None));
            cases.push(fail_case("exponential", None, None));
            cases.push(fail_case("power", Some(-2), None));
            cases.push(fail_case("sin-plus", None, Some(2.0)));

            RunConfig {
                command: CommandKind::Painleve,
                seed: Some(seed),
                painleve: Some(PainleveSection {
                    coefficient: None,
                    sweep: Some(cases),
                    times: Some(TimesCfg {
                        start: 0.1,
                        end: 2.0,
                        count: 12,
                    }),
                    manifold: Some(ManifoldCfg {
                        kind: "linear".into(),
                        value: Some(1.0),
                    }),
                    u0: None,
                }),
                ..base
            }
        }
        other => bail!(
            "unknown preset '{other}' (available: {})",
            PRESET_NAMES.join(", ")
        ),
    })
}
