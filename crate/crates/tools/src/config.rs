//! Scheme configuration files (TOML).
//!
//! ```toml
//! kind = "explicit"          # secret_sharing | geometrical | explicit
//! mode = "lifted"            # lifted | oneshot
//! N = 4
//! K = 2
//! T = 2
//! M = 3
//! q = 5                      # optional: smallest compatible prime otherwise
//! generator = [[1, 0, 1, 1], [0, 1, 1, 2]]
//! lambda = [[1, 0], [0, 1], [1, 1], [1, 2]]
//! mixed = [4]                # 1-based servers
//! seed = 7
//! message_len = 2            # oneshot mode only; defaults to K
//! ```

use oneshot_pir::oneshot::{default_modulus, Construction};
use oneshot_pir::protocol::{DecodingState, OneShotRun, QueryBatch, QueryProtocol, QueryRandomness, RandomnessLayout};
use oneshot_pir::{FieldModulus, GeneratorSpec, LiftedScheme, OneShotScheme, PirError, PirParams, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Lifted,
    Oneshot,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub kind: String,
    #[serde(default)]
    pub mode: Mode,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K", default = "one")]
    pub k: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub q: Option<u32>,
    pub generator: Option<Vec<Vec<i64>>>,
    pub lambda: Option<Vec<Vec<i64>>>,
    pub mixed: Option<Vec<usize>>,
    #[serde(default)]
    pub seed: u64,
    pub message_len: Option<usize>,
}

fn one() -> usize {
    1
}

fn bad(msg: impl Into<String>) -> PirError {
    PirError::Parameter(msg.into())
}

impl SchemeConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| bad(format!("config: {}", e.message())))
    }

    pub fn construction(&self) -> Result<Construction> {
        Construction::parse(&self.kind).ok_or_else(|| bad(format!("unknown scheme kind {:?}", self.kind)))
    }

    fn mixed0(&self) -> Result<Vec<usize>> {
        let mixed = self.mixed.clone().ok_or_else(|| bad("explicit schemes need `mixed` positions"))?;
        mixed.iter().map(|&p| p.checked_sub(1).ok_or_else(|| bad("mixed positions are 1-based"))).collect()
    }

    fn explicit_rows(&self) -> Result<(&[Vec<i64>], &[Vec<i64>])> {
        let g = self.generator.as_deref().ok_or_else(|| bad("explicit schemes need `generator` rows"))?;
        let l = self.lambda.as_deref().ok_or_else(|| bad("explicit schemes need `lambda` rows"))?;
        Ok((g, l))
    }

    pub fn modulus(&self) -> Result<FieldModulus> {
        if let Some(q) = self.q {
            return FieldModulus::new(q);
        }
        let kind = self.construction()?;
        if kind == Construction::Explicit {
            let (g, l) = self.explicit_rows()?;
            let mixed = self.mixed0()?;
            default_modulus(kind, self.n, self.k, self.t, Some((g, l, &mixed)))
        } else {
            default_modulus(kind, self.n, self.k, self.t, None)
        }
    }

    pub fn build_scheme(&self) -> Result<OneShotScheme> {
        let kind = self.construction()?;
        let modulus = self.modulus()?;
        let params = PirParams::new(self.n, self.k, self.t, self.m, modulus.q())?;
        match kind {
            Construction::SecretSharing => {
                if self.k != 1 {
                    return Err(bad("secret sharing schemes need K = 1"));
                }
                OneShotScheme::secret_sharing(self.n, self.t, self.m, modulus)
            }
            Construction::Geometrical => {
                let g = match &self.generator {
                    Some(rows) => GeneratorSpec::from_rows(modulus, rows)?,
                    None => GeneratorSpec::vandermonde(self.n, self.k, modulus)?,
                };
                OneShotScheme::geometrical(params, g)
            }
            Construction::Explicit => {
                let (g, l) = self.explicit_rows()?;
                OneShotScheme::explicit(params, g, l, &self.mixed0()?)
            }
        }
    }

    pub fn build_pipeline(&self) -> Result<Pipeline> {
        let scheme = self.build_scheme()?;
        let protocol = match self.mode {
            Mode::Lifted => Protocol::Lifted(LiftedScheme::new(&scheme, self.m)?),
            Mode::Oneshot => {
                let len = self.message_len.unwrap_or(self.k);
                Protocol::OneShot(OneShotRun::new(&scheme, self.m, len)?)
            }
        };
        Ok(Pipeline { config: self.clone(), scheme, protocol })
    }
}

#[derive(Debug, Clone)]
pub enum Protocol {
    Lifted(LiftedScheme),
    OneShot(OneShotRun),
}

/// A configured scheme ready to run.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: SchemeConfig,
    pub scheme: OneShotScheme,
    pub protocol: Protocol,
}

impl Pipeline {
    pub fn collusion(&self) -> usize {
        self.config.t
    }

    /// Same pipeline with the noise code replaced by zeros.
    pub fn with_zeroed_noise(&self) -> Result<Pipeline> {
        let zeroed = self.scheme.with_zeroed_noise();
        let protocol = match &self.protocol {
            Protocol::Lifted(_) => Protocol::Lifted(LiftedScheme::new(&zeroed, self.config.m)?),
            Protocol::OneShot(run) => Protocol::OneShot(OneShotRun::new(&zeroed, self.config.m, run.message_len())?),
        };
        Ok(Pipeline { config: self.config.clone(), scheme: zeroed, protocol })
    }

    /// Message blocks touched by each transmitted slot, per server.
    pub fn slot_supports(&self) -> Vec<Vec<Vec<usize>>> {
        match &self.protocol {
            Protocol::Lifted(s) => {
                (0..s.servers()).map(|i| s.plan().server_slots(i).iter().map(|sl| sl.subset.clone()).collect()).collect()
            }
            Protocol::OneShot(r) => {
                let all: Vec<usize> = (0..r.message_count()).collect();
                (0..r.servers()).map(|_| vec![all.clone(); r.rounds()]).collect()
            }
        }
    }

    fn inner(&self) -> &dyn QueryProtocol {
        match &self.protocol {
            Protocol::Lifted(s) => s,
            Protocol::OneShot(r) => r,
        }
    }
}

impl QueryProtocol for Pipeline {
    fn generator(&self) -> &GeneratorSpec {
        self.inner().generator()
    }

    fn message_count(&self) -> usize {
        self.inner().message_count()
    }

    fn message_len(&self) -> usize {
        self.inner().message_len()
    }

    fn layout(&self, desired: usize) -> Result<RandomnessLayout> {
        self.inner().layout(desired)
    }

    fn assemble(&self, desired: usize, r: &QueryRandomness) -> Result<(QueryBatch, DecodingState)> {
        self.inner().assemble(desired, r)
    }
}
