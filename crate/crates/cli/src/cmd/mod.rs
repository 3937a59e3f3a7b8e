pub mod amplify;
pub mod check;
pub mod count;
pub mod gen;
pub mod reduce;
pub mod session;
pub mod wta;

use clap::ValueEnum;
use embcol::counting::embcol_count;
use embcol::graphs::{rand_colored, structured_instance, ColoredInstance, PatternGraph};
use embcol::oracle::CountOracle;
use embcol::rng::Stream;

/// Draws before giving up on finding an input the oracle answers wrongly.
const WRONG_INPUT_DRAWS: usize = 2000;

/// Where the worst-case inputs of a statistical run come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Inputs {
    /// Uniform binary instances.
    Random,
    /// The structured families in turn.
    Structured,
    /// Structured families on even trials; on odd trials an instance the
    /// oracle itself answers wrongly, when one turns up.
    Adversarial,
}

impl Inputs {
    pub fn draw(self, pattern: &PatternGraph, n: usize, trial: u64, oracle: &CountOracle<'_>, rng: &mut Stream) -> anyhow::Result<ColoredInstance> {
        Ok(match self {
            Inputs::Random => rand_colored(pattern, n, rng),
            Inputs::Structured => structured_instance(pattern, n, trial as usize, rng),
            Inputs::Adversarial if trial % 2 == 0 => structured_instance(pattern, n, trial as usize / 2, rng),
            Inputs::Adversarial => {
                let mut y = rand_colored(pattern, n, rng);
                for _ in 0..WRONG_INPUT_DRAWS {
                    if oracle.query(&y).ok() != Some(embcol_count(&y)?) {
                        break;
                    }
                    y = rand_colored(pattern, n, rng);
                }
                y
            }
        })
    }
}
