use magbloch::basis::PlaneWaveBasis;
use magbloch::fiber::assemble_fiber;
use magbloch::fixtures;
use magbloch::{C64, CMatrix};

fn main() {
    let model = fixtures::cos4d(1.0);
    let basis = PlaneWaveBasis::new(4, 1);
    let fib = assemble_fiber(&model, &basis, &[0.0, 0.0, 5.0/6.0, 0.0]).unwrap();
    let h = fib.matrix.clone();
    let se = h.clone().symmetric_eigen();
    // reconstruction error
    let mut d = CMatrix::zeros(81, 81);
    for i in 0..81 { d[(i,i)] = C64::new(se.eigenvalues[i], 0.0); }
    let rec = &se.eigenvectors * &d * se.eigenvectors.adjoint();
    println!("reconstruction err: {:.3e}", (&h - &rec).norm());
    println!("orthonormality err: {:.3e}", (se.eigenvectors.adjoint() * &se.eigenvectors - CMatrix::identity(81,81)).norm());
    // per-pair residuals vs rayleigh quotients
    let mut bad = 0;
    for i in 0..81 {
        let v = se.eigenvectors.column(i);
        let hv = &h * v;
        let lam = se.eigenvalues[i];
        let resid = (&hv - v * C64::new(lam, 0.0)).norm();
        let ray = v.dotc(&hv).re;
        if resid > 1e-6 {
            bad += 1;
            if bad <= 5 {
                println!("pair {i}: claimed {lam:.4}, rayleigh {ray:.4}, resid {resid:.3e}");
            }
        }
    }
    println!("bad pairs: {bad}/81");
}
