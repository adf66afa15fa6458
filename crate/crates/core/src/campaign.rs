//! Verification campaigns: a word, a list of checks, one JSON report.
//!
//! Config files are flat `key = value` lines; `check` may repeat and `#`
//! starts a comment. Checks run independently (in parallel under
//! [`Exec::Parallel`]) and are reported in declaration order.

use std::path::PathBuf;
use std::time::Instant;

use serde_json::{json, Value};

use crate::builtin::{resolve, NamedWord};
use crate::error::{invalid, Error, Result};
use crate::factors::{complexity_profile, morse_hedlund_detect, PeriodicityVerdict};
use crate::flow::{
    flow_matrix, frequency_vector, kernel_basis, kirchhoff_residual, propagate_frequencies,
    tijdeman_audit, Irrationality, Side,
};
use crate::graphs::{dendricity_check, rauzy_graph, second_derivative_identity_check};
use crate::par::{self, Exec};

/// Environment variable capping every horizon.
pub const HORIZON_CAP_VAR: &str = "SLAB_HORIZON_CAP";

/// `horizon`, lowered to `SLAB_HORIZON_CAP` when that is set.
pub fn capped_horizon(horizon: usize) -> usize {
    std::env::var(HORIZON_CAP_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map_or(horizon, |cap| horizon.min(cap))
}

/// The CSV of the flow matrix of `2(010)^ω` at length 1.
pub const FLOW_MATRIX_EXAMPLE_CSV: &str = ",00,01,10,20\n0,0,1,-1,-1\n1,0,-1,1,0\n2,0,0,0,1\n";

pub const CHECKS: &[&str] = &[
    "complexity",
    "sturmian",
    "morse-hedlund",
    "semi-connected",
    "kernel",
    "kirchhoff",
    "tijdeman",
    "dendric",
    "second-derivative",
    "flow-matrix",
    "flow-matrix-example",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CampaignConfig {
    pub word: String,
    pub checks: Vec<String>,
    pub n_max: usize,
    pub horizon: usize,
    /// Prefix lengths for empirical frequencies.
    pub prefixes: Vec<usize>,
    /// Claimed maximal degree of irrationality, for words without exact
    /// frequencies.
    pub claimed_delta: Option<usize>,
    /// JSON report path; stdout when absent.
    pub output: Option<PathBuf>,
    /// Directory for CSV/DOT exports.
    pub export_dir: Option<PathBuf>,
    pub timing: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            word: String::new(),
            checks: Vec::new(),
            n_max: 8,
            horizon: 20_000,
            prefixes: vec![10_000],
            claimed_delta: None,
            output: None,
            export_dir: None,
            timing: true,
        }
    }
}

impl CampaignConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = CampaignConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            let num = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("line {}: `{v}` is not a count", i + 1)))
            };
            match k {
                "word" => cfg.word = v.to_string(),
                "check" => cfg.checks.push(v.to_string()),
                "n_max" => cfg.n_max = num(v)?,
                "horizon" => cfg.horizon = num(v)?,
                "prefixes" => {
                    cfg.prefixes = v.split(',').map(|x| num(x.trim())).collect::<Result<_>>()?
                }
                "claimed_delta" => cfg.claimed_delta = Some(num(v)?),
                "output" => cfg.output = Some(v.into()),
                "export_dir" => cfg.export_dir = Some(v.into()),
                "timing" => cfg.timing = v == "true",
                _ => return Err(Error::Parse(format!("line {}: unknown key `{k}`", i + 1))),
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.word.is_empty() {
            return Err(invalid("no word given"));
        }
        if self.checks.is_empty() {
            return Err(invalid("no checks given"));
        }
        if let Some(c) = self.checks.iter().find(|c| !CHECKS.contains(&c.as_str())) {
            return Err(invalid(format!("unknown check `{c}`")));
        }
        if self.horizon < self.n_max + 2 {
            return Err(invalid(format!(
                "horizon {} must be at least n_max + 2 = {}",
                self.horizon,
                self.n_max + 2
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    /// Set when a factor table was not saturated: the verdict is
    /// horizon-bounded and does not affect the exit code.
    pub caveat: bool,
    pub details: Value,
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignReport {
    pub word: String,
    pub n_max: usize,
    pub horizon: usize,
    pub checks: Vec<CheckOutcome>,
}

impl CampaignReport {
    /// 0 iff every check without a caveat passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().all(|c| c.pass || c.caveat) {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut v = json!({
                    "name": c.name,
                    "pass": c.pass,
                    "caveat": c.caveat,
                    "details": c.details,
                });
                if let Some(ms) = c.elapsed_ms {
                    v["elapsed_ms"] = json!(ms);
                }
                v
            })
            .collect();
        json!({
            "word": self.word,
            "n_max": self.n_max,
            "horizon": self.horizon,
            "checks": checks,
            "exit_code": self.exit_code(),
        })
    }
}

/// Runs every check of a validated config. Errors only for an unusable
/// config or word spec; failing checks are part of the report.
pub fn run_campaign(cfg: &CampaignConfig, exec: Exec) -> Result<CampaignReport> {
    cfg.validate()?;
    let horizon = capped_horizon(cfg.horizon);
    if horizon < cfg.n_max + 2 {
        return Err(invalid(format!(
            "{HORIZON_CAP_VAR} leaves horizon {horizon} < n_max + 2"
        )));
    }
    let word = resolve(&cfg.word, horizon)?;
    if let Some(dir) = &cfg.export_dir {
        std::fs::create_dir_all(dir)?;
    }
    let ctx = Ctx {
        cfg,
        word: &word,
        horizon,
        exec,
    };
    let checks = par::map(exec, &cfg.checks, |name| {
        let start = Instant::now();
        let (pass, caveat, details) = match ctx.run(name) {
            Ok(r) => r,
            Err(e) => (false, false, json!({ "error": e.to_string() })),
        };
        CheckOutcome {
            name: name.clone(),
            pass,
            caveat,
            details,
            elapsed_ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
        }
    });
    Ok(CampaignReport {
        word: cfg.word.clone(),
        n_max: cfg.n_max,
        horizon,
        checks,
    })
}

struct Ctx<'a> {
    cfg: &'a CampaignConfig,
    word: &'a NamedWord,
    horizon: usize,
    exec: Exec,
}

type Verdict = (bool, bool, Value);

impl Ctx<'_> {
    fn run(&self, name: &str) -> Result<Verdict> {
        let w = &self.word.stream;
        let (n_max, h) = (self.cfg.n_max, self.horizon);
        match name {
            "complexity" => {
                let p = complexity_profile(w, n_max, h, self.exec)?;
                Ok((true, !p.all_saturated(), json!({ "complexity": p.values })))
            }
            "sturmian" => {
                let p = complexity_profile(w, n_max, h, self.exec)?;
                let ok = p.values.iter().enumerate().all(|(n, &v)| v == n + 1);
                Ok((ok, !p.all_saturated(), json!({ "complexity": p.values })))
            }
            "morse-hedlund" => {
                let r = morse_hedlund_detect(w, n_max, h)?;
                let verdict = match r.verdict {
                    PeriodicityVerdict::EventuallyPeriodic { n0, .. } => {
                        json!({ "eventually_periodic": true, "n0": n0 })
                    }
                    PeriodicityVerdict::NoEvidence => json!({ "eventually_periodic": false }),
                };
                Ok((true, !r.saturated, verdict))
            }
            "semi-connected" => {
                let mut sat = true;
                let mut bad = Vec::new();
                for n in 0..=n_max {
                    let g = rauzy_graph(w, n, h)?;
                    sat &= g.saturated;
                    if !g.is_semi_connected() {
                        bad.push(n);
                    }
                }
                Ok((
                    bad.is_empty(),
                    !sat,
                    json!({ "not_semi_connected_at": bad }),
                ))
            }
            "kernel" => {
                let mut sat = true;
                let mut rows = Vec::new();
                let mut ok = true;
                for n in 0..=n_max {
                    let (m, s) = flow_matrix(w, n, h)?;
                    sat &= s;
                    let left = kernel_basis(&m, Side::Left);
                    let right = kernel_basis(&m, Side::Right);
                    let expected = m.cols() + 1 - m.rows();
                    let good = left.is_all_ones_line() && right.dimension() == expected;
                    ok &= good;
                    rows.push(json!({
                        "n": n,
                        "left_all_ones": left.is_all_ones_line(),
                        "right_dimension": right.dimension(),
                        "expected": expected,
                    }));
                }
                Ok((ok, !sat, json!({ "lengths": rows })))
            }
            "kirchhoff" => self.kirchhoff(),
            "tijdeman" => {
                let d = w.alphabet().size();
                let info = match (&self.word.exact_freqs, self.cfg.claimed_delta) {
                    (Some(f), _) => Irrationality::Exact(f.clone()),
                    (None, Some(k)) => Irrationality::Claimed {
                        delta: None,
                        max_delta: k,
                    },
                    (None, None) => Irrationality::Unknown,
                };
                let a = tijdeman_audit(w, d, n_max, h, &info, self.exec)?;
                Ok((a.passes(), !a.saturated, a.to_json()))
            }
            "dendric" => {
                let r = dendricity_check(w, n_max, h, self.exec)?;
                Ok((r.is_dendric(), !r.saturated, r.to_json(w.alphabet())))
            }
            "second-derivative" => {
                let mut sat = true;
                let mut failed = Vec::new();
                for n in 0..=n_max {
                    let r = second_derivative_identity_check(w, n, h)?;
                    sat &= r.saturated;
                    if !r.pass {
                        failed.push(n);
                    }
                }
                Ok((failed.is_empty(), !sat, json!({ "failed_at": failed })))
            }
            "flow-matrix" => {
                let (m, sat) = flow_matrix(w, n_max, h)?;
                self.export(&format!("flow-matrix-{n_max}.csv"), &m.to_csv())?;
                Ok((
                    m.column_sums().iter().all(num_traits::Zero::is_zero),
                    !sat,
                    m.to_json(),
                ))
            }
            "flow-matrix-example" => {
                let (m, sat) = flow_matrix(w, 1, h)?;
                let csv = m.to_csv();
                self.export("flow-matrix-example.csv", &csv)?;
                Ok((csv == FLOW_MATRIX_EXAMPLE_CSV, !sat, json!({ "csv": csv })))
            }
            _ => Err(invalid(format!("unknown check `{name}`"))),
        }
    }

    /// Exact residual when letter frequencies are exact and propagate to
    /// factors; otherwise empirical, against `10·p(n)·(n+1)/P`.
    fn kirchhoff(&self) -> Result<Verdict> {
        let w = &self.word.stream;
        let (n_max, h) = (self.cfg.n_max, self.horizon);
        let prefix = self.cfg.prefixes.last().copied().unwrap_or(10_000).min(h);
        let mut rows = Vec::new();
        let mut ok = true;
        let mut sat = true;
        for n in 1..=n_max {
            let (m, s) = flow_matrix(w, n, h)?;
            sat &= s;
            let exact = self
                .word
                .exact_freqs
                .as_ref()
                .and_then(|f| propagate_frequencies(w, f, n + 1, h).ok());
            let row = if let Some(f) = exact {
                let r = kirchhoff_residual(&m, &f)?;
                ok &= r.is_zero();
                json!({ "n": n, "mode": "exact", "residual": r.to_string() })
            } else {
                let f = frequency_vector(w, n + 1, &[prefix])?.remove(0);
                let r = kirchhoff_residual(&m, &f)?.to_f64();
                let bound = 10.0 * m.rows() as f64 * (n + 1) as f64 / prefix as f64;
                ok &= r <= bound;
                json!({ "n": n, "mode": "empirical", "residual": r, "bound": bound })
            };
            rows.push(row);
        }
        Ok((ok, !sat, json!({ "lengths": rows })))
    }

    fn export(&self, file: &str, contents: &str) -> Result<()> {
        if let Some(dir) = &self.cfg.export_dir {
            std::fs::write(dir.join(file), contents)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(word: &str, checks: &[&str]) -> CampaignConfig {
        CampaignConfig {
            word: word.into(),
            checks: checks.iter().map(|s| s.to_string()).collect(),
            n_max: 6,
            horizon: 5000,
            timing: false,
            ..Default::default()
        }
    }

    #[test]
    fn parse_config() {
        let c = CampaignConfig::parse(
            "word = builtin:fibonacci\ncheck = complexity\n# note\ncheck=dendric\nn_max=5\nprefixes=100,1000\n",
        )
        .unwrap();
        assert_eq!(c.checks, vec!["complexity", "dendric"]);
        assert_eq!((c.n_max, c.prefixes.clone()), (5, vec![100, 1000]));
        assert!(CampaignConfig::parse("bogus = 1").is_err());
        let mut bad = cfg("builtin:fibonacci", &["nope"]);
        assert!(bad.validate().is_err());
        bad.checks = vec!["complexity".into()];
        bad.horizon = 3;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn fibonacci_campaign_passes() {
        let c = cfg(
            "builtin:fibonacci",
            &[
                "complexity",
                "sturmian",
                "dendric",
                "tijdeman",
                "kernel",
                "kirchhoff",
            ],
        );
        let r = run_campaign(&c, Exec::Parallel).unwrap();
        assert_eq!(r.exit_code(), 0, "{}", r.to_json());
    }

    #[test]
    fn golden_csv_check_and_determinism() {
        let c = cfg(
            "builtin:two-then-010",
            &["flow-matrix-example", "kernel", "dendric"],
        );
        let a = run_campaign(&c, Exec::Parallel).unwrap();
        let b = run_campaign(&c, Exec::Sequential).unwrap();
        assert!(a.checks[0].pass);
        assert_eq!(a.to_json().to_string(), b.to_json().to_string());
        // Not recurrent, so some extension graph is not a tree.
        assert!(!a.checks[2].pass);
        assert_eq!(a.exit_code(), 1);
    }

    #[test]
    fn bad_word_spec_is_an_error() {
        assert!(
            run_campaign(&cfg("builtin:nonexistent", &["complexity"]), Exec::Parallel).is_err()
        );
    }
}
