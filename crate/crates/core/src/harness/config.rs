use std::fmt::Write as _;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::bni::LabelSource;
use crate::coloring::Epsilon;
use crate::dynamic::Strategy;
use crate::graph::GraphFamily;
use crate::olocal::ProblemKind;
use crate::{Error, Result};

/// Operations that `run` can execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    AlgorithmA,
    Linial,
    Defective,
    Kw31,
    Batched32,
    Hk,
    Hstar,
    Bni,
}

impl Algo {
    pub const ALL: [Algo; 8] = [
        Algo::AlgorithmA,
        Algo::Linial,
        Algo::Defective,
        Algo::Kw31,
        Algo::Batched32,
        Algo::Hk,
        Algo::Hstar,
        Algo::Bni,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algo::AlgorithmA => "algorithm-a",
            Algo::Linial => "linial",
            Algo::Defective => "defective",
            Algo::Kw31 => "kw31",
            Algo::Batched32 => "batched32",
            Algo::Hk => "hk",
            Algo::Hstar => "hstar",
            Algo::Bni => "bni",
        }
    }
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Algo::ALL.iter().map(Algo::name).collect();
                Error::Config(format!(
                    "unknown algorithm `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Everything a run, report or dynamic experiment needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algo: Algo,
    pub eps: Epsilon,
    pub k: Option<u32>,
    pub p: Option<u64>,
    pub strategy: Strategy,
    pub t: usize,
    pub batches: usize,
    pub family: GraphFamily,
    pub n: u32,
    pub dmax: u32,
    pub seeds: Vec<u64>,
    pub sweep: Vec<u32>,
    pub problem: ProblemKind,
    pub labels: LabelSource,
    pub strict: bool,
    pub trace: bool,
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            algo: Algo::Kw31,
            eps: Epsilon { num: 1, den: 2 },
            k: None,
            p: None,
            strategy: Strategy::Direct,
            t: 1,
            batches: 100,
            family: GraphFamily::RandomBoundedDegree,
            n: 200,
            dmax: 8,
            seeds: vec![1],
            sweep: vec![4, 8, 16, 32, 64],
            problem: ProblemKind::Mis,
            labels: LabelSource::Ids,
            strict: true,
            trace: false,
            out: None,
        }
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("bad value `{s}` for `{key}`")))
        })
        .collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("bad boolean `{value}` for `{key}`"))),
    }
}

impl ExperimentConfig {
    /// Sets one `key = value` pair.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        match key {
            "algo" => self.algo = value.parse()?,
            "eps" => self.eps = value.parse()?,
            "k" => self.k = Some(parse_one(key, value)?),
            "p" => self.p = Some(parse_one(key, value)?),
            "strategy" => self.strategy = value.parse()?,
            "t" => self.t = parse_one(key, value)?,
            "batches" => self.batches = parse_one(key, value)?,
            "family" => {
                self.family = value
                    .trim()
                    .parse()
                    .map_err(|e| Error::Config(format!("{e}")))?
            }
            "n" => self.n = parse_one(key, value)?,
            "dmax" => self.dmax = parse_one(key, value)?,
            "seed" | "seeds" => self.seeds = parse_list(key, value)?,
            "sweep" => self.sweep = parse_list(key, value)?,
            "problem" => self.problem = value.parse().map_err(Error::Config)?,
            "labels" => self.labels = value.parse()?,
            "strict" => self.strict = parse_bool(key, value)?,
            "trace" => self.trace = parse_bool(key, value)?,
            "out" => self.out = Some(value.trim().to_string()),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            config
                .set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.n == 0 {
            return fail("n must be positive");
        }
        if self.dmax == 0 {
            return fail("dmax must be positive");
        }
        if self.seeds.is_empty() {
            return fail("at least one seed is required");
        }
        if self.t == 0 {
            return fail("t must be positive");
        }
        if self.algo == Algo::Hk && self.k.is_none_or(|k| k == 0) {
            return fail("hk needs a positive k");
        }
        if self.algo == Algo::Defective && self.p.is_none_or(|p| p == 0) {
            return fail("defective needs a positive p");
        }
        if self.sweep.contains(&0) {
            return fail("sweep degrees must be positive");
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back the same config.
    pub fn to_text(&self) -> String {
        let join = |xs: &[String]| xs.join(",");
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        kv("algo", self.algo.to_string());
        kv("eps", self.eps.to_string());
        if let Some(k) = self.k {
            kv("k", k.to_string());
        }
        if let Some(p) = self.p {
            kv("p", p.to_string());
        }
        kv("strategy", self.strategy.to_string());
        kv("t", self.t.to_string());
        kv("batches", self.batches.to_string());
        kv("family", self.family.to_string());
        kv("n", self.n.to_string());
        kv("dmax", self.dmax.to_string());
        kv(
            "seeds",
            join(&self.seeds.iter().map(u64::to_string).collect::<Vec<_>>()),
        );
        kv(
            "sweep",
            join(&self.sweep.iter().map(u32::to_string).collect::<Vec<_>>()),
        );
        kv("problem", self.problem.to_string());
        kv("labels", self.labels.to_string());
        kv("strict", self.strict.to_string());
        kv("trace", self.trace.to_string());
        if let Some(o) = &self.out {
            kv("out", o.clone());
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of the canonical text.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_text() {
        let text = "algo = batched32\neps = 1/3\nseeds = 1, 2,3 # three\nfamily = line-graph-of-random:3\nstrict = false\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.algo, Algo::Batched32);
        assert_eq!(c.seeds, vec![1, 2, 3]);
        assert!(!c.strict);
        let again = ExperimentConfig::parse(&c.to_text()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.hash(), c.hash());
        assert_eq!(c.hash().len(), 16);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::parse("algo = nope").is_err());
        assert!(ExperimentConfig::parse("colour = 3").is_err());
        assert!(ExperimentConfig::parse("algo = hk").is_err());
        assert!(ExperimentConfig::parse("n = 0").is_err());
        assert!(ExperimentConfig::parse("just text").is_err());
        assert!(ExperimentConfig::parse("eps = 2").is_err());
    }
}
