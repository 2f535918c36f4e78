//! Built-in benchmark games, their recommendation distributions and `.efg` I/O.

mod builders;
mod efg;
mod recommendations;

pub use builders::{
    builtin, builtin_games, extended_bos, extended_mp, extended_shapleys, in_or_out, macqueen,
    sequential_extended_bos, BUILTIN_NAMES, DEFAULT_SHAPLEY_BONUS,
};
pub use efg::{parse_efg, write_efg, EfgError};
pub use recommendations::{
    extended_bos_recommendations, extended_mp_recommendations, in_or_out_recommendation, macqueen_recommendations,
    sequential_bos_recommendations, uniform_mixture,
};
