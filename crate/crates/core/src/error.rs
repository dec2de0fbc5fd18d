use std::fmt;

use thiserror::Error;

/// Where in the scenario or profile text a syntax error occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TextPos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for TextPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Which foot of a shock curve a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Foot {
    Left,
    Right,
}

impl fmt::Display for Foot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Foot::Left => f.write_str("left"),
            Foot::Right => f.write_str("right"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("derivative order {order} exceeds the supported maximum {max}")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("speed {c} lies outside [{lo}, {hi}] of the inversion bracket")]
    OutOfRange { c: f64, lo: f64, hi: f64 },

    #[error("G' is not monotone on [{a}, {b}]")]
    InvalidBracket { a: f64, b: f64 },

    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: TextPos, msg: String },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("piece {piece} is singular at x = {x}")]
    SingularPiece { piece: usize, x: f64 },

    #[error("x = {x} is a breakpoint; an interior query there is ambiguous")]
    AmbiguousSide { x: f64 },

    #[error("operation requires a shock point, got {0}")]
    InvalidKind(String),

    #[error("no sign change of the seed polynomial on (-{s_max}, 0) for k = {k}, p = {p}, A = {a}")]
    RootBracket { k: usize, p: f64, a: f64, s_max: f64 },

    #[error("seed rejected by the local stability condition; largest admissible delta is {max_delta}")]
    SeedRejected { max_delta: f64 },

    #[error("h(x_l) = h(x_r); the chord slope is undefined")]
    UndefinedSlope,

    #[error("degenerate jump: u_l = u_r = {0}")]
    DegenerateJump(f64),

    #[error("vanishing denominator 1 + h'(x)t at the {foot} foot (x = {x}, t = {t})")]
    SingularDenominator { foot: Foot, x: f64, t: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("X = {x} at t = {t} lies outside the rarefaction cone")]
    OutOfFan { x: f64, t: f64 },

    #[error("t = {t} is at or past the focusing time {t_focus} of the straight segment")]
    FocusedSegment { t: f64, t_focus: f64 },

    #[error("shock graph covers [0, {covered}] but t = {requested} was requested")]
    MissingGraph { covered: f64, requested: f64 },

    #[error("internal consistency failure at t = {t}: {msg}")]
    Consistency { t: f64, msg: String },

    #[error("run aborted at t = {t}: {msg}")]
    Aborted { t: f64, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
