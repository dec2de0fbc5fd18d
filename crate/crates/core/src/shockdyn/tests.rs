use approx::assert_relative_eq;

use super::*;
use crate::classify::PointKind;

fn parse(src: &str) -> PiecewiseProfile {
    PiecewiseProfile::parse(src).unwrap()
}

fn run(src: &str, model: FluxModel, t_end: f64, dt: f64) -> ShockGraph {
    evolve(&parse(src), &model, EvolveOptions::new(t_end, dt)).unwrap()
}

#[test]
fn shock_speed_examples() {
    assert_eq!(shock_speed(&FluxModel::Burgers, 1.0, 0.0).unwrap(), 0.5);
    assert_eq!(shock_speed(&FluxModel::PowerQuartic, 1.0, -1.0).unwrap(), 0.0);
    assert!(shock_speed(&FluxModel::Burgers, 1.0, 1.0).is_err());
}

#[test]
fn kind1_rates() {
    let m = FluxModel::Burgers;
    let riemann = parse("x < 0: 1 ; x >= 0: 0");
    assert_eq!(rhs_kind1(&riemann, &m, -1.0, 1.0, 3.0).unwrap(), (-0.5, 0.5));
    let ex1 = parse("x < 0: x + 1.5 ; x >= 0: x^2 - 2*x");
    let (dl, dr) = rhs_kind1(&ex1, &m, 0.0, 0.0, 0.0).unwrap();
    assert_eq!((dl, dr), (0.75 - 1.5, 0.75));
    let flat = parse("1");
    assert!(matches!(rhs_kind1(&flat, &m, -1.0, 1.0, 1.0), Err(Error::DegenerateJump(_))));
}

#[test]
fn kind2_rates() {
    let m = FluxModel::Burgers;
    let fan = Fan::new(&m, 0.0, -5.0, 5.0).unwrap();
    let flat = parse("2");
    assert_relative_eq!(rhs_kind2(&flat, &m, -1.0, 1.0, &fan, Foot::Left).unwrap(), -0.5);
    let p = parse("x < 0: 0.3 ; x >= 0: 2*x");
    assert_eq!(rhs_kind2(&p, &m, 0.0, 0.7, &fan, Foot::Left).unwrap(), 0.0);
    // Burgers reduction (x - x*) / (2 t (1 + f' t)) on a sloped foot
    let slope = parse("0.5*x + 1");
    let v = rhs_kind2(&slope, &m, -0.4, 2.0, &fan, Foot::Left).unwrap();
    assert_relative_eq!(v, -0.4 / (2.0 * 2.0 * (1.0 + 0.5 * 2.0)), epsilon = 1e-15);
    assert!(rhs_kind2(&flat, &m, -1.0, 0.0, &fan, Foot::Left).is_err());
}

#[test]
fn kind3_rates() {
    let m = FluxModel::Burgers;
    let f1 = Fan::new(&m, -1.0, -10.0, 10.0).unwrap();
    let f2 = Fan::new(&m, 1.0, -10.0, 10.0).unwrap();
    assert_eq!(rhs_kind3(&m, 0.0, 1.0, &f1, &f2).unwrap(), 0.0);
    assert_eq!(rhs_kind3(&m, 1.0, 2.0, &f1, &f2).unwrap(), 0.5);
    assert_eq!(rhs_kind3(&m, 2.0, 2.0, &f2, &f2).unwrap(), 0.5);
    let q = FluxModel::PowerQuartic;
    let g = Fan::new(&q, 1.0, -1.0, 2.0).unwrap();
    assert!(rhs_kind3(&q, 1.5, 2.0, &g, &g).is_err());
}

#[test]
fn riemann_shock_moves_at_half_speed() {
    let g = run("x < 0: 1 ; x >= 0: 0", FluxModel::Burgers, 1.0, 0.1);
    assert_eq!(g.curves.len(), 1);
    let last = g.curves[0].samples.last().unwrap();
    assert_eq!(last.t, 1.0);
    assert!((last.xi - 0.5).abs() <= 1e-12);
    assert!(g.events.is_empty());
}

#[test]
fn hat_focuses_into_a_stationary_shock() {
    let g = run("x < -1: 1; -1 <= x < 1: -x; x >= 1: -1", FluxModel::Burgers, 3.0, 0.01);
    let act: Vec<_> = g.events_of(EventKind::StraightLineActivate).collect();
    assert_eq!(act.len(), 1);
    assert_relative_eq!(act[0].time, 1.0, epsilon = 1e-12);
    assert_eq!(g.curves.len(), 1);
    let c = &g.curves[0];
    assert_relative_eq!(c.t_start(), 1.0, epsilon = 1e-12);
    for s in &c.samples {
        assert!(s.xi.abs() < 1e-12);
    }
    assert_relative_eq!(c.samples.last().unwrap().x_l(), -3.0, epsilon = 1e-10);
}

#[test]
fn example4_stays_inside_its_fan() {
    // the left state never exceeds h = 0, so the ray cannot reach h(0+) = 1/3
    let g = run("x < 0: -(x+1)^2/2 ; x >= 0: x + 1", FluxModel::PowerQuartic, 10.0, 1e-3);
    let enter: Vec<_> = g.events_of(EventKind::EnterRarefaction).collect();
    assert_eq!(enter.len(), 1);
    assert!(enter[0].time > 4.0 && enter[0].time < 4.2);
    assert_eq!(g.events_of(EventKind::ExitRarefaction).count(), 0);
    for s in &g.curves[0].samples {
        assert_eq!(s.regime(), Regime::Kind2CrossFromLeft);
        assert!(g.fans[0].contains_ray(s.xi / s.t));
    }
}

#[test]
fn fourth_kind_shock_leaves_its_fan() {
    let src = "x < 0: -x + 0.1*x^3 ; x >= 0: 0.5";
    let p = parse(src);
    let g = evolve(&p, &FluxModel::Burgers, EvolveOptions::new(10.0, 1e-3)).unwrap();
    let exit: Vec<_> = g.events_of(EventKind::ExitRarefaction).collect();
    assert_eq!(exit.len(), 1);
    let ctx = motion::Ctx { profile: &p, model: &FluxModel::Burgers, fans: &g.fans };
    let mut kind1 = 0;
    for s in &g.curves[0].samples {
        match s.regime() {
            Regime::Kind2CrossFromLeft => {
                assert!(s.t <= exit[0].time);
                assert!(g.fans[0].contains_ray(s.xi / s.t) || (s.xi / s.t - g.fans[0].h_hi).abs() < 1e-9);
            }
            Regime::Kind1 => {
                kind1 += 1;
                assert!(s.t >= exit[0].time);
                let Source::Foot { x, piece } = s.right else { panic!() };
                let st = ctx.foot(x, piece);
                assert!((x + st.h * s.t - s.xi).abs() <= CONSISTENCY_TOL);
            }
            r => panic!("unexpected regime {r}"),
        }
    }
    assert!(kind1 > 100);
}

#[test]
fn two_fans_merge_into_a_third_kind_shock() {
    let src = "x < -1: 0; -1 <= x < 1: 1.5 - x - 0.1*x^3; x >= 1: 3";
    let g = run(src, FluxModel::Burgers, 3.0, 1e-3);
    let kinds: Vec<_> = g.points.iter().filter(|p| p.kind != PointKind::Inert).map(|p| p.kind).collect();
    assert_eq!(kinds, vec![PointKind::Shock4, PointKind::Shock4]);
    let merges: Vec<_> = g.events_of(EventKind::Merge).collect();
    assert_eq!(merges.len(), 1);
    let merged = g.curves.iter().find(|c| matches!(c.origin, Origin::Merge(..))).unwrap();
    let third: Vec<_> = merged.samples.iter().filter(|s| matches!(s.regime(), Regime::Kind3 { .. })).collect();
    assert!(third.len() > 10);
    // xi = (x1 + x2)/2 + C t for Burgers
    let c = third[0].xi / third[0].t;
    for s in &third {
        assert!((s.xi - c * s.t).abs() <= 1e-8 * s.t.max(1.0), "{} {}", s.t, s.xi - c * s.t);
        for (center, fan) in [(-1.0, &g.fans[0]), (1.0, &g.fans[1])] {
            let ray = (s.xi - center) / s.t;
            assert!(ray >= fan.h_lo - 1e-12 && ray <= fan.h_hi + 1e-12);
        }
    }
}

#[test]
fn example5_merges_once() {
    let g = run("exp((-x^4 + 5*x^2)/10)", FluxModel::Burgers, 10.0, 1e-2);
    let third = g.points.iter().filter(|p| p.kind == PointKind::Shock3).count();
    assert_eq!(third, 2);
    assert_eq!(g.events_of(EventKind::Merge).count(), 1);
}

#[test]
fn graph_csv_is_deterministic() {
    let a = run("exp(-x^2)", FluxModel::Burgers, 3.0, 1e-2);
    let b = run("exp(-x^2)", FluxModel::Burgers, 3.0, 1e-2);
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    a.write_curves_csv(&mut ca).unwrap();
    b.write_curves_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
    let text = String::from_utf8(ca).unwrap();
    assert!(text.starts_with("curve_id,regime,t,x_l,x_r,xi\n0,kind1,"));
}
