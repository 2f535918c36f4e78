//! Hindsight rationality for extensive-form games: deviation classes, their
//! best benefits on empirical play, and CFR self-play that produces it.

pub mod deviations;
pub mod efg_core;
pub mod fmt;
pub mod game_library;
pub mod hindsight_eval;
pub mod learners;
