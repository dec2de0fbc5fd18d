//! Workloads shared by the benchmarks.

use charsweep::{FluxModel, PiecewiseProfile};

/// Profile text, flux and window of the five worked examples.
pub const EXAMPLES: [(&str, &str, bool, (f64, f64)); 5] = [
    ("example1", "x < 0: x + 1.5 ; x >= 0: x^2 - 2*x", false, (-3.0, 2.0)),
    ("example2", "x < 0: 1 - exp(x) ; x >= 0: x^2 - 2*x", false, (-12.0, 3.0)),
    ("example3", "2*x/(1 + x^2)^2", false, (-8.0, 8.0)),
    ("example4", "x < 0: -(x^2 + 2*x + 1)/2 ; x >= 0: x + 1", true, (-2.5, 1.0)),
    ("example5", "exp((-x^4 + 5*x^2)/10)", false, (-4.0, 11.0)),
];

pub fn example(i: usize) -> (&'static str, PiecewiseProfile, FluxModel) {
    let (name, src, quartic, (lo, hi)) = EXAMPLES[i];
    let p = PiecewiseProfile::parse(src).and_then(|p| p.with_domain(lo, hi)).expect("bundled profile parses");
    (name, p, if quartic { FluxModel::PowerQuartic } else { FluxModel::Burgers })
}
