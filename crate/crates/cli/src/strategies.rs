//! Strategy names accepted on the command line.

use std::str::FromStr;

use ordgame_core::extraction::ExtractedProver;
use ordgame_core::strategy::{
    derive_seed, AppendixProver, Delayer, GreedyProver, PaperDelayer, Prover, RandomDelayer, RandomProver,
};
use ordgame_core::wellorder::WellOrderCodec;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Name {
    PaperDelayer,
    AppendixProver,
    Random,
    Greedy,
    Extracted,
    /// Every scripted opponent of the given depth and value bound.
    Exhaustive { depth: usize, bound: u64 },
}

impl FromStr for Name {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "paper-delayer" => Name::PaperDelayer,
            "appendix-prover" => Name::AppendixProver,
            "random" => Name::Random,
            "greedy" => Name::Greedy,
            "extracted" => Name::Extracted,
            _ => {
                let parts: Vec<&str> = s.split(':').collect();
                match parts.as_slice() {
                    ["exhaustive", d, b] => Name::Exhaustive {
                        depth: d.parse().map_err(|_| format!("bad depth in {s}"))?,
                        bound: b.parse().map_err(|_| format!("bad value bound in {s}"))?,
                    },
                    _ => {
                        return Err(format!(
                            "unknown strategy {s:?}; expected paper-delayer, appendix-prover, random, greedy, extracted or exhaustive:<depth>:<bound>"
                        ))
                    }
                }
            }
        })
    }
}

/// Fixed sub-streams of the run seed.
pub const PROVER_STREAM: u64 = 1;
pub const DELAYER_STREAM: u64 = 2;

/// Everything needed to instantiate one side of a match.
pub struct Setup<'a> {
    pub k: usize,
    pub h: usize,
    pub codec: &'a dyn WellOrderCodec,
    pub value_bound: u64,
    pub unchecked: bool,
    pub extracted: Option<&'a ExtractedProver>,
}

pub fn prover(name: &Name, s: &Setup, seed: u64) -> Result<Box<dyn Prover>, CliError> {
    let seed = derive_seed(seed, PROVER_STREAM);
    Ok(match name {
        Name::AppendixProver if s.k != 1 => return Err(CliError::Input("appendix-prover plays level 1 only".into())),
        Name::AppendixProver if s.unchecked => Box::new(AppendixProver::unchecked(s.h)),
        Name::AppendixProver => Box::new(AppendixProver::new(s.h, s.codec).map_err(|e| CliError::Input(e.to_string()))?),
        Name::Random => Box::new(RandomProver::new(seed, s.value_bound, 4)),
        Name::Greedy => Box::new(GreedyProver),
        Name::Extracted => match s.extracted {
            Some(p) => Box::new(p.clone()),
            None => return Err(CliError::Input("extracted prover needs --proof".into())),
        },
        other => return Err(CliError::Input(format!("{other:?} is not a single prover"))),
    })
}

pub fn delayer(name: &Name, s: &Setup, seed: u64) -> Result<Box<dyn Delayer>, CliError> {
    let seed = derive_seed(seed, DELAYER_STREAM);
    Ok(match name {
        Name::PaperDelayer if s.unchecked => Box::new(PaperDelayer::unchecked(s.k, s.h)),
        Name::PaperDelayer => {
            Box::new(PaperDelayer::new(s.k, s.h, s.codec).map_err(|e| CliError::Input(e.to_string()))?)
        }
        Name::Random => Box::new(RandomDelayer::new(seed, s.value_bound)),
        other => return Err(CliError::Input(format!("{other:?} is not a single delayer"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse() {
        assert_eq!("exhaustive:4:3".parse(), Ok(Name::Exhaustive { depth: 4, bound: 3 }));
        assert_eq!("paper-delayer".parse(), Ok(Name::PaperDelayer));
        assert!("exhaustive:4".parse::<Name>().is_err());
        assert!("minimax".parse::<Name>().is_err());
    }
}
