//! Adaptive Gauss-Kronrod (7, 15) quadrature for small vector-valued integrands.

use crate::error::{FpuError, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Piece<const M: usize> {
    a: f64,
    b: f64,
    value: [f64; M],
    error: [f64; M],
}

fn gk15<const M: usize, F: Fn(f64) -> [f64; M]>(f: &F, a: f64, b: f64) -> Piece<M> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = [0.0; M];
    let mut g = [0.0; M];
    for i in 0..M {
        k[i] = WGK[7] * fc[i];
        g[i] = WG[3] * fc[i];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for i in 0..M {
            let s = f1[i] + f2[i];
            k[i] += WGK[j] * s;
            if j % 2 == 1 {
                g[i] += WG[j / 2] * s;
            }
        }
    }
    let mut value = [0.0; M];
    let mut error = [0.0; M];
    for i in 0..M {
        value[i] = k[i] * h;
        error[i] = ((k[i] - g[i]) * h).abs();
    }
    Piece { a, b, value, error }
}

/// Integrates every component of `f` over the union of consecutive intervals
/// given by `breaks` to a relative tolerance `rel_tol` per component.
pub fn integrate<const M: usize, F>(f: F, breaks: &[f64], rel_tol: f64) -> Result<[f64; M]>
where
    F: Fn(f64) -> [f64; M],
{
    if breaks.len() < 2 {
        return Err(FpuError::InvalidParameter("need at least two break points".into()));
    }
    let mut pieces: Vec<Piece<M>> = breaks.windows(2).map(|w| gk15(&f, w[0], w[1])).collect();
    loop {
        let mut total = [0.0; M];
        let mut err = [0.0; M];
        for p in &pieces {
            for i in 0..M {
                total[i] += p.value[i];
                err[i] += p.error[i];
            }
        }
        // worst component relative to its own magnitude
        let mut worst = 0usize;
        let mut worst_ratio = 0.0;
        let mut done = true;
        for i in 0..M {
            let scale = total[i].abs().max(f64::MIN_POSITIVE);
            let ratio = err[i] / scale;
            if ratio > rel_tol {
                done = false;
            }
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst = i;
            }
        }
        if done {
            return Ok(total);
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(FpuError::QuadratureNonConvergence { achieved: worst_ratio });
        }
        let idx = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error[worst].total_cmp(&y.1.error[worst]))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let p = pieces.swap_remove(idx);
        let mid = 0.5 * (p.a + p.b);
        pieces.push(gk15(&f, p.a, mid));
        pieces.push(gk15(&f, mid, p.b));
    }
}
