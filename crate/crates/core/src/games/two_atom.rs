use num_complex::Complex64;

use super::spec::TwoAtomSpec;
use crate::error::check_dim;
use crate::quantum::ProjectiveState;
use crate::Result;

/// Projective drift of the two-atom system with controls `(u, v)`.
///
/// `w` holds the `d^2 - 1` coordinates `w_{jk} = chi_{jk} / chi_{00}` for `(j, k) != (0, 0)`,
/// flattened as `j d + k - 1`. Player I's Hamiltonian acts on the first index, player II's on
/// the second through `h^II_{pk}`, and `A` couples them.
pub fn two_atom_drift(spec: &TwoAtomSpec, u: f64, v: f64, w: &ProjectiveState) -> Result<Vec<Complex64>> {
    let d = spec.atom_dim();
    check_dim(d * d, w.n() + 1)?;
    let big = w.lifted();
    let at = |j: usize, k: usize| big[j * d + k];
    let h1 = spec.h_i.inner();
    let h2 = spec.h_ii.inner();
    let a = spec.interaction.inner();

    // (M W)_{jk} with M = u H^I (x) 1 + v h^II acting on the second index + A.
    let mw = |j: usize, k: usize| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for p in 0..d {
            s += u * h1[(j, p)] * at(p, k) + v * h2[(p, k)] * at(j, p);
        }
        let row = j * d + k;
        for (col, z) in big.iter().enumerate() {
            s += a[(row, col)] * z;
        }
        s
    };
    let m00 = mw(0, 0);
    let i = Complex64::i();
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in 0..d {
            if j == 0 && k == 0 {
                continue;
            }
            out.push(i * (at(j, k) * m00 - mw(j, k)));
        }
    }
    Ok(out)
}
