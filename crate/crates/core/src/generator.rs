//! Sequence generators addressed by compact spec strings of the form
//! `name:key=value,…:length`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fib_core::FibTable;
use crate::sequence::{Domain, RealSequence, SequenceFile, Subject};

/// Largest `j` for which `f_{j+1}^2` is a finite `f64`.
const FIB_SPIKE_MAX_J: usize = 738;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorName {
    Const,
    HarmonicPerturbed,
    SquareSpikes,
    FibSquareSpikes,
    Alternating,
    CustomFile,
}

impl GeneratorName {
    pub const ALL: [GeneratorName; 6] = [
        GeneratorName::Const,
        GeneratorName::HarmonicPerturbed,
        GeneratorName::SquareSpikes,
        GeneratorName::FibSquareSpikes,
        GeneratorName::Alternating,
        GeneratorName::CustomFile,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorName::Const => "const",
            GeneratorName::HarmonicPerturbed => "harmonic_perturbed",
            GeneratorName::SquareSpikes => "square_spikes",
            GeneratorName::FibSquareSpikes => "fib_square_spikes",
            GeneratorName::Alternating => "alternating",
            GeneratorName::CustomFile => "custom_file",
        }
    }

    fn own_keys(self) -> &'static [&'static str] {
        match self {
            GeneratorName::Const => &["c"],
            GeneratorName::HarmonicPerturbed => &["c", "amp"],
            GeneratorName::SquareSpikes => &["c", "amp", "seed"],
            GeneratorName::FibSquareSpikes => &["c"],
            GeneratorName::Alternating => &["lo", "hi"],
            GeneratorName::CustomFile => &["path"],
        }
    }

    fn default_domain(self) -> Domain {
        match self {
            GeneratorName::Const => Domain::Terms,
            _ => Domain::Image,
        }
    }
}

impl fmt::Display for GeneratorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A validated generator spec. Parameters keep their original spelling and
/// order so that formatting reproduces the parsed string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: GeneratorName,
    params: Vec<(String, String)>,
    pub length: usize,
}

fn bad(token: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Generator {
        token: token.into(),
        reason: reason.into(),
    }
}

pub fn parse_generator(spec: &str) -> Result<GeneratorSpec> {
    spec.parse()
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(spec, "expected `name:key=value,…:length`"));
        }
        let name = GeneratorName::ALL
            .into_iter()
            .find(|g| g.as_str() == parts[0])
            .ok_or_else(|| bad(parts[0], "unknown generator name"))?;

        let mut params: Vec<(String, String)> = Vec::new();
        for token in parts[1].split(',').filter(|t| !t.is_empty()) {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| bad(token, "parameter must be key=value"))?;
            let allowed = name.own_keys().contains(&key) || key == "dim" || key == "domain";
            if !allowed {
                return Err(bad(token, format!("unknown key `{key}` for {name}")));
            }
            if params.iter().any(|(k, _)| k == key) {
                return Err(bad(token, format!("duplicate key `{key}`")));
            }
            validate_value(key, value).map_err(|reason| bad(token, reason))?;
            params.push((key.to_string(), value.to_string()));
        }

        let length: usize = parts[2]
            .parse()
            .map_err(|_| bad(parts[2], "length must be a positive integer"))?;
        if length == 0 {
            return Err(bad(parts[2], "length must be a positive integer"));
        }
        let spec = GeneratorSpec {
            name,
            params,
            length,
        };
        if name == GeneratorName::FibSquareSpikes && length >= (FIB_SPIKE_MAX_J + 1).pow(2) {
            return Err(bad(
                parts[2],
                format!(
                    "fib_square_spikes overflows f64 beyond length {}",
                    (FIB_SPIKE_MAX_J + 1).pow(2) - 1
                ),
            ));
        }
        Ok(spec)
    }
}

fn validate_value(key: &str, value: &str) -> std::result::Result<(), String> {
    match key {
        "path" => {
            if value.is_empty() {
                return Err("path must be nonempty".into());
            }
        }
        "domain" => {
            if value != "terms" && value != "image" {
                return Err("domain must be `terms` or `image`".into());
            }
        }
        "dim" => match value.parse::<usize>() {
            Ok(d) if d > 0 => {}
            _ => return Err("dim must be a positive integer".into()),
        },
        "seed" => {
            value
                .parse::<u64>()
                .map_err(|_| "seed must be a nonnegative integer".to_string())?;
        }
        _ => match value.parse::<f64>() {
            Ok(v) if v.is_finite() => {}
            _ => return Err(format!("`{key}` must be a finite number")),
        },
    }
    Ok(())
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}:{}:{}", self.name, params.join(","), self.length)
    }
}

impl Serialize for GeneratorSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl GeneratorSpec {
    pub fn new(name: GeneratorName, length: usize) -> Self {
        Self {
            name,
            params: Vec::new(),
            length,
        }
    }

    /// Adds or replaces a parameter, validating it like the parser does.
    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Result<Self> {
        let value = value.to_string();
        let token = format!("{key}={value}");
        if !(self.name.own_keys().contains(&key) || key == "dim" || key == "domain") {
            return Err(bad(token, format!("unknown key `{key}` for {}", self.name)));
        }
        validate_value(key, &value).map_err(|reason| bad(token, reason))?;
        match self.params.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.params.push((key.to_string(), value)),
        }
        Ok(self)
    }

    pub fn params(&self) -> &[(String, String)] {
        &self.params
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    // Values were validated at construction, so these parses cannot fail.
    fn num(&self, key: &str, default: f64) -> f64 {
        self.get(key).map_or(default, |v| v.parse().expect("validated"))
    }

    fn dim(&self) -> usize {
        self.get("dim").map_or(1, |v| v.parse().expect("validated"))
    }

    pub fn domain(&self) -> Domain {
        match self.get("domain") {
            Some("terms") => Domain::Terms,
            Some("image") => Domain::Image,
            _ => self.name.default_domain(),
        }
    }

    /// Materializes the prefix. The values are the terms `x` or the image
    /// `F̂x` according to [`GeneratorSpec::domain`].
    pub fn generate(&self) -> Result<Subject> {
        let n = self.length;
        let provenance = self.to_string();
        if self.name == GeneratorName::CustomFile {
            let path = self.get("path").ok_or_else(|| bad(&provenance, "custom_file needs path"))?;
            let mut subject = SequenceFile::read(Path::new(path))?;
            subject.values = subject.values.with_provenance(provenance.clone());
            if subject.len() < n {
                return Err(bad(
                    path,
                    format!("file holds {} terms, spec asks for {n}", subject.len()),
                ));
            }
            subject = subject.truncated(n)?;
            if self.get("domain").is_some() {
                subject.domain = self.domain();
            }
            if let Some(d) = self.get("dim") {
                if d.parse::<usize>().ok() != Some(subject.dim()) {
                    return Err(bad(format!("dim={d}"), "does not match the file"));
                }
            }
            return Ok(subject);
        }

        let c = self.num("c", 0.0);
        let scalars: Vec<f64> = match self.name {
            GeneratorName::Const => vec![c; n],
            GeneratorName::HarmonicPerturbed => {
                let amp = self.num("amp", 1.0);
                (1..=n).map(|k| c + amp / k as f64).collect()
            }
            GeneratorName::SquareSpikes => {
                let amp = self.num("amp", 1.0);
                let seed = self.get("seed").map_or(0, |v| v.parse().expect("validated"));
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut v = vec![c; n];
                let mut j = 1usize;
                while j * j <= n {
                    v[j * j - 1] = c + amp * (1.0 + rng.gen::<f64>());
                    j += 1;
                }
                v
            }
            GeneratorName::FibSquareSpikes => {
                let table = FibTable::new(FIB_SPIKE_MAX_J + 1);
                let mut v = vec![c; n];
                let mut j = 1usize;
                while j * j <= n {
                    let f = to_f64(table.get(j + 1)?);
                    v[j * j - 1] = c + f * f;
                    j += 1;
                }
                v
            }
            GeneratorName::Alternating => {
                let lo = self.num("lo", 0.0);
                let hi = self.num("hi", 1.0);
                (1..=n).map(|k| if k % 2 == 1 { lo } else { hi }).collect()
            }
            GeneratorName::CustomFile => unreachable!(),
        };
        let dim = self.dim();
        let values = if dim == 1 {
            RealSequence::scalar(scalars, provenance)?
        } else {
            let flat = scalars
                .iter()
                .flat_map(|&v| std::iter::repeat_n(v, dim))
                .collect();
            RealSequence::from_flat(flat, dim, provenance)?
        };
        Ok(Subject {
            values,
            domain: self.domain(),
        })
    }
}

fn to_f64(v: &num_bigint::BigUint) -> f64 {
    num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY)
}

/// Seeded family of convergent, statistically convergent and divergent
/// members, cycling through the generator kinds.
pub fn default_family(members: usize, seed: u64, length: usize) -> Vec<GeneratorSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fmt4 = |v: f64| format!("{v:.4}");
    let fib_length = length.min((FIB_SPIKE_MAX_J + 1).pow(2) - 1);
    (0..members)
        .map(|i| {
            let spec = match i % 6 {
                0 => format!("const:c={}:{length}", fmt4(rng.gen_range(-5.0..5.0))),
                1 => format!(
                    "harmonic_perturbed:c={},amp={}:{length}",
                    fmt4(rng.gen_range(-5.0..5.0)),
                    fmt4(rng.gen_range(0.1..1.0))
                ),
                2 => format!(
                    "square_spikes:c={},amp={},seed={}:{length}",
                    fmt4(rng.gen_range(-5.0..5.0)),
                    fmt4(rng.gen_range(1.0..10.0)),
                    rng.gen_range(0..1_000_000u64)
                ),
                3 => {
                    let lo = rng.gen_range(-3.0..3.0);
                    let gap = rng.gen_range(1.0..4.0);
                    format!("alternating:lo={},hi={}:{length}", fmt4(lo), fmt4(lo + gap))
                }
                4 => format!(
                    "fib_square_spikes:c={}:{fib_length}",
                    fmt4(rng.gen_range(-5.0..5.0))
                ),
                _ => format!(
                    "harmonic_perturbed:c={},amp={},domain=terms:{length}",
                    fmt4(rng.gen_range(-5.0..5.0)),
                    fmt4(rng.gen_range(0.1..1.0))
                ),
            };
            spec.parse().expect("family specs are well formed")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let s = parse_generator("const:c=1:1000").unwrap();
        let subj = s.generate().unwrap();
        assert_eq!(subj.len(), 1000);
        assert!(subj.values.as_flat().iter().all(|&v| v == 1.0));

        let s = parse_generator("square_spikes:amp=1:10000").unwrap();
        let subj = s.generate().unwrap();
        let spikes = subj.values.as_flat().iter().filter(|&&v| v != 0.0).count();
        assert_eq!(spikes, 100);
        assert!(subj.values.as_flat().iter().all(|&v| v == 0.0 || v >= 1.0));
    }

    #[test]
    fn bad_value_names_the_token() {
        let err = parse_generator("const:c=abc:10").unwrap_err().to_string();
        assert!(err.contains("c=abc"), "{err}");
        for bad in [
            "nope:c=1:10",
            "const:c=1:0",
            "const:c=1:-3",
            "const:amp=1:10",
            "const:c=1,c=2:10",
            "const:c=1",
            "const:c:10",
            "alternating:lo=inf:10",
        ] {
            assert!(parse_generator(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn round_trips() {
        for s in [
            "const:c=1:1000",
            "alternating::1000",
            "square_spikes:c=2.5000,amp=3,seed=7:500",
            "harmonic_perturbed:amp=0.5,c=-1,domain=terms,dim=2:64",
        ] {
            assert_eq!(parse_generator(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn fib_spikes_follow_the_fibonacci_squares() {
        let subj = parse_generator("fib_square_spikes::100").unwrap().generate().unwrap();
        let v = subj.values.as_flat();
        let expected = [1.0, 4.0, 9.0, 25.0, 64.0, 169.0, 441.0, 1156.0, 3025.0, 7921.0];
        for (j, e) in expected.iter().enumerate() {
            assert_eq!(v[(j + 1) * (j + 1) - 1], *e);
        }
        assert_eq!(v.iter().filter(|&&x| x != 0.0).count(), 10);
        assert!(parse_generator("fib_square_spikes::546121").is_err());
        assert!(parse_generator("fib_square_spikes::546120").is_ok());
    }

    #[test]
    fn family_is_deterministic() {
        let a = default_family(12, 1, 100);
        let b = default_family(12, 1, 100);
        assert_eq!(a, b);
        assert_ne!(a, default_family(12, 2, 100));
    }
}
