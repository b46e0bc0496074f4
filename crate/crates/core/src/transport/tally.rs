use crate::geometry::{for_each_chord, impact_parameter};
use crate::real::Real;

/// `∫_{u1}^{u2} e^{−a u} du`, stable for small `a·(u2 − u1)`.
pub fn decayed_length<T: Real>(a: T, u1: T, u2: T) -> T {
    let d = u2 - u1;
    if a == T::zero() {
        return d;
    }
    let head = (-a * u1).exp();
    let ad = a * d;
    if ad.abs() < T::lit(1e-8) {
        head * d * (T::one() - ad * T::lit(0.5))
    } else {
        head * -(-ad).exp_m1() / a
    }
}

/// Track-length scoring of one straight flight of length `s` from `(r, μ)`
/// on the radial cells `edges`. The weight starts at `w0` and decays at rate
/// `absorption`; `score(cell, value)` receives `w0·∫ e^{−absorption·u} du`
/// over each chord piece. Pieces outside the tally mesh are dropped.
pub fn tally_track_length<T: Real, F: FnMut(usize, T)>(
    r: T,
    mu: T,
    s: T,
    w0: T,
    absorption: T,
    edges: &[T],
    mut score: F,
) {
    let x0 = r * mu;
    let y = impact_parameter(r, mu);
    for_each_chord(edges, x0, x0 + s, y, |cell, xa, xb| {
        score(cell, w0 * decayed_length(absorption, xa - x0, xb - x0));
    });
}

/// Volume of the spherical shell `[a, b]`.
pub fn shell_volume<T: Real>(a: T, b: T) -> T {
    T::lit(4.0 / 3.0) * T::PI() * (b * b * b - a * a * a)
}
