//! Independent topological oracles for the acceptance suite.
//!
//! These never touch the plaquette/curvature code paths they validate:
//! the 2D degree comes from the skyrmion-density integral on a fine grid,
//! the 4D degree from signed preimage counting of a regular value via
//! Newton iteration.

use magbloch::synthetic::{dirac_unit, skyrmion_unit};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// (1/4π) ∫ n̂ · (∂₁n̂ × ∂₂n̂) d²κ on a fine grid; converges to the integer
/// degree of n̂ : T² → S².
pub fn skyrmion_degree_oracle(m_p: f64, fine: usize) -> f64 {
    let n = fine;
    let h = 1.0 / n as f64;
    let unit = |i: i64, j: i64| -> [f64; 3] {
        let k = [
            (i.rem_euclid(n as i64)) as f64 * h,
            (j.rem_euclid(n as i64)) as f64 * h,
        ];
        skyrmion_unit(&k, m_p)
    };
    let mut total = 0.0;
    for i in 0..n as i64 {
        for j in 0..n as i64 {
            let c = unit(i, j);
            let d1: Vec<f64> = (0..3)
                .map(|a| (unit(i + 1, j)[a] - unit(i - 1, j)[a]) / (2.0 * h))
                .collect();
            let d2: Vec<f64> = (0..3)
                .map(|a| (unit(i, j + 1)[a] - unit(i, j - 1)[a]) / (2.0 * h))
                .collect();
            let cross = [
                d1[1] * d2[2] - d1[2] * d2[1],
                d1[2] * d2[0] - d1[0] * d2[2],
                d1[0] * d2[1] - d1[1] * d2[0],
            ];
            total += c[0] * cross[0] + c[1] * cross[1] + c[2] * cross[2];
        }
    }
    total * h * h / (2.0 * TAU)
}

/// Signed preimage count of a generic regular value of n̂ : T⁴ → S⁴,
/// found by Newton iteration from a seed grid. Returns (degree, preimages).
pub fn dirac_degree_oracle(m_p: f64, seeds: usize) -> (i64, usize) {
    // generic regular value
    let mut q = [0.31, 0.12, -0.27, 0.18, 0.88];
    let qn = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut q {
        *x /= qn;
    }
    // orthonormal tangent basis at q by Gram-Schmidt of coordinate axes
    let mut basis: Vec<[f64; 5]> = Vec::new();
    for a in 0..5 {
        let mut v = [0.0; 5];
        v[a] = 1.0;
        let qdot: f64 = (0..5).map(|i| q[i] * v[i]).sum();
        for i in 0..5 {
            v[i] -= qdot * q[i];
        }
        for b in &basis {
            let d: f64 = (0..5).map(|i| b[i] * v[i]).sum();
            for i in 0..5 {
                v[i] -= d * b[i];
            }
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-8 {
            for x in &mut v {
                *x /= nv;
            }
            basis.push(v);
            if basis.len() == 4 {
                break;
            }
        }
    }
    let f = |k: &[f64; 4]| -> [f64; 4] {
        let n = dirac_unit(k, m_p);
        let mut out = [0.0; 4];
        for (r, b) in basis.iter().enumerate() {
            out[r] = (0..5).map(|i| b[i] * (n[i] - q[i])).sum();
        }
        out
    };
    let jac = |k: &[f64; 4]| -> [[f64; 4]; 4] {
        let h = 1e-6;
        let mut j = [[0.0; 4]; 4];
        for c in 0..4 {
            let mut kp = *k;
            let mut km = *k;
            kp[c] += h;
            km[c] -= h;
            let fp = f(&kp);
            let fm = f(&km);
            for r in 0..4 {
                j[r][c] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        j
    };
    let mut found: Vec<([i64; 4], f64)> = Vec::new();
    let s = seeds;
    for a in 0..s {
        for b in 0..s {
            for c in 0..s {
                for d in 0..s {
                    let mut k = [
                        a as f64 / s as f64 + 0.013,
                        b as f64 / s as f64 + 0.013,
                        c as f64 / s as f64 + 0.013,
                        d as f64 / s as f64 + 0.013,
                    ];
                    let mut ok = false;
                    for _ in 0..80 {
                        let r = f(&k);
                        let rn = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                        if rn < 1e-12 {
                            ok = true;
                            break;
                        }
                        let j = jac(&k);
                        match solve4(&j, &r) {
                            Some(dk) => {
                                let step = dk.iter().map(|x| x * x).sum::<f64>().sqrt();
                                if step > 0.5 {
                                    break;
                                }
                                for i in 0..4 {
                                    k[i] -= dk[i];
                                }
                            }
                            None => break,
                        }
                    }
                    if !ok {
                        continue;
                    }
                    // preimages of q, not of −q (f = 0 on both caps)
                    let n = dirac_unit(&k, m_p);
                    let ndotq: f64 = (0..5).map(|i| n[i] * q[i]).sum();
                    if ndotq < 0.5 {
                        continue;
                    }
                    let key = [
                        (k[0].rem_euclid(1.0) * 1e6).round() as i64,
                        (k[1].rem_euclid(1.0) * 1e6).round() as i64,
                        (k[2].rem_euclid(1.0) * 1e6).round() as i64,
                        (k[3].rem_euclid(1.0) * 1e6).round() as i64,
                    ];
                    let key = key.map(|v| v.rem_euclid(1_000_000));
                    if found.iter().any(|(fk, _)| {
                        fk.iter()
                            .zip(&key)
                            .all(|(a, b)| (a - b).rem_euclid(1_000_000).min((b - a).rem_euclid(1_000_000)) <= 2)
                    }) {
                        continue;
                    }
                    let j = jac(&k);
                    found.push((key, det4(&j).signum()));
                }
            }
        }
    }
    let degree: f64 = found.iter().map(|(_, sgn)| sgn).sum();
    (degree as i64, found.len())
}

fn solve4(a: &[[f64; 4]; 4], b: &[f64; 4]) -> Option<[f64; 4]> {
    let mut m = *a;
    let mut x = *b;
    for col in 0..4 {
        let mut piv = col;
        for r in (col + 1)..4 {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, piv);
        x.swap(col, piv);
        for r in 0..4 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..4 {
                    m[r][c] -= f * m[col][c];
                }
                x[r] -= f * x[col];
            }
        }
    }
    Some([x[0] / m[0][0], x[1] / m[1][1], x[2] / m[2][2], x[3] / m[3][3]])
}

fn det4(a: &[[f64; 4]; 4]) -> f64 {
    let mut m = *a;
    let mut det = 1.0;
    for col in 0..4 {
        let mut piv = col;
        for r in (col + 1)..4 {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col].abs() < 1e-300 {
            return 0.0;
        }
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det *= m[col][col];
        for r in (col + 1)..4 {
            let f = m[r][col] / m[col][col];
            for c in col..4 {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}
