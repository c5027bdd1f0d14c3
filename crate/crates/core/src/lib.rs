//! Coded shift spaces: length spectra, characteristic equations,
//! G-Bernoulli measures and the worked families built on them.

pub mod constructions;
pub mod entropy;
pub mod error;
pub mod families;
pub mod genset;
pub mod measures;
pub mod sampler;
pub mod sofic;
pub mod words;

pub use entropy::{solve_entropy, solve_pressure, CharacteristicSolution, SolveStatus, WeightedPotential};
pub use error::{Error, Result};
pub use measures::{GBernoulliMeasure, GeneratorLaw, MeasureSource};
pub use sampler::{empirical_entropy, sample_window, SampleWindow, WindowSampler};
pub use sofic::{count_language, factor_automaton, FactorAutomaton};
pub use genset::{GeneratingSet, GeneratorFamily, TailBound};
pub use words::{Alphabet, Symbol, Word};
