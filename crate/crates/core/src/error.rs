use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spline order {0} is outside 1..=4")]
    InvalidOrder(u32),

    #[error("sample is empty")]
    EmptySample,

    #[error("observation {0} is not finite")]
    NonFinite(f64),

    #[error("weight vector has length {weights}, sample has {n} points")]
    WeightLength { weights: usize, n: usize },

    #[error("cannot refine a level-{from} polynomial to coarser level {to}")]
    RefineDown { from: u32, to: u32 },

    #[error("pair statistic needs j < l, got j={j}, l={l}")]
    PairOrder { j: u32, l: u32 },

    #[error("degenerate resolution grid for n={n}: j_min={j_min} is not below j_max={j_max}")]
    DegenerateGrid { n: usize, j_min: i64, j_max: i64 },

    #[error("route selector needs the Haar kernel (r=1), got r={0}")]
    RouteRequiresHaar(u32),

    #[error("Gram symbol is not strictly positive (min {0})")]
    NonPositiveSymbol(f64),

    #[error("sigma={0} exceeds the 1/2 normalization")]
    SigmaTooLarge(f64),

    #[error("support spans {cells} cells at level {level}, above the {limit} cell limit")]
    SupportTooWide { cells: u64, level: u32, limit: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
