use superdiff::fracdiff::{evolve, self_similar_profile_check, GridFunction};

use crate::Check;

const FIVE_SIXTHS: f64 = 5.0 / 6.0;

fn sup_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.values.iter().zip(&b.values).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn run(c: &mut Check) {
    let g = GridFunction::gaussian(100.0, 1 << 14, 0.0, 0.5, 1.0).unwrap();
    let two = evolve(&evolve(&g, 0.9, FIVE_SIXTHS, 0.3).unwrap(), 0.9, FIVE_SIXTHS, 0.7).unwrap();
    let one = evolve(&g, 0.9, FIVE_SIXTHS, 1.0).unwrap();
    let semigroup = sup_diff(&two, &one) / one.peak();
    c.require(semigroup < 1e-12, format!("semigroup defect {semigroup:e}"));
    c.note(format!("semigroup T(0.7)T(0.3) vs T(1): {semigroup:.1e} of peak"));

    let (d, t, sigma) = (0.8, 1.3, 1.0);
    let heat = evolve(&GridFunction::gaussian(100.0, 1 << 14, 0.0, sigma, 1.0).unwrap(), d, 1.0, t).unwrap();
    let width = (sigma * sigma + 2.0 * d * t).sqrt();
    let closed = GridFunction::gaussian(100.0, 1 << 14, 0.0, width, 1.0).unwrap();
    let heat_err = sup_diff(&heat, &closed) / closed.peak();
    c.require(heat_err < 1e-8, format!("heat kernel error {heat_err:e}"));
    c.note(format!("exponent-1 flow vs closed-form Gaussian: {heat_err:.1e} relative"));

    let mut worst_mass = 0.0f64;
    for &(d, t) in &[(0.3, 0.5), (1.0, 1.0), (2.0, 4.0)] {
        let u = evolve(&g, d, FIVE_SIXTHS, t).unwrap();
        worst_mass = worst_mass.max((u.mass() - g.mass()).abs() / g.mass());
    }
    c.require(worst_mass < 1e-12, format!("mass defect {worst_mass:e}"));
    c.note(format!("mass conservation: {worst_mass:.1e} relative"));

    let narrow = GridFunction::gaussian(3000.0, 1 << 19, 0.0, 0.05, 1.0).unwrap();
    let dist = self_similar_profile_check(&narrow, 1.0, FIVE_SIXTHS, 1.0, 2.0).unwrap();
    let peak = evolve(&narrow, 1.0, FIVE_SIXTHS, 2.0).unwrap().peak();
    c.require(dist < 1e-3 * peak, format!("dilation distance {dist} vs peak {peak}"));
    c.note(format!("5/6 self-similar dilation: distance {:.2e} of peak", dist / peak));
}
