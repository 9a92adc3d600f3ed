use envlab_core::gff::*;
use envlab_core::kernel::{psi0, psi0_inv, psi0_inv_deriv, psi0_deriv, BoundaryPoint, LEFT_ARC_LO, LEFT_ARC_HI};
use envlab_core::measure::{BoundaryMeasure, PolyPiece};
use envlab_core::rng;
use num_complex::Complex64;
use rand_distr::Distribution;

fn main() {
    let a = 1.3f64;
    let nu = BoundaryMeasure {
        atoms: vec![],
        pieces: vec![PolyPiece { theta_lo: LEFT_ARC_LO, theta_hi: LEFT_ARC_HI, coeffs: vec![a] }],
    };
    let q = MeasureQuad::new(&nu, 24);
    let mut state = FlowState::new(&nu, &q, &[], &[]);
    let mut r = rng::stream(63, 0);
    let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
    let dt = 1e-4f64;
    for _ in 0..8 {
        let new_xi = state.xi + 2.0 * dt.sqrt() * normal.sample(&mut r);
        state.advance(new_xi, dt);
    }
    let lam = lambda();
    let xi = state.xi;
    let e_iu = psi0_inv(Complex64::new(xi, 0.0));
    // pick a mid-arc angle
    let theta = 2.9f64;
    let (g, gp) = state.replay_boundary(theta).unwrap();
    let x_h = {
        let p = BoundaryPoint::from_measure_angle(theta).point();
        psi0(p).finite().unwrap().re
    };
    // H-side integrand per dθ
    let h_side = (1.0 / lam) * gp * 0.5 * (1.0 + x_h * x_h) * a / ((xi - g) * (xi - g));
    // disk-side integrand per dθ with prefactor
    let x = BoundaryPoint::from_measure_angle(theta).point();
    let gc = Complex64::new(g, 0.0);
    let fx = psi0_inv(gc);
    let fpx = psi0_inv_deriv(gc) * gp * psi0_deriv(x);
    let pref = -Complex64::i() * (e_iu - Complex64::i()) * (e_iu - Complex64::i()) / (2.0 * lam);
    let d_side = pref * x * fpx * a / ((e_iu - fx) * (e_iu - fx));
    println!("H-side integrand  {h_side:.9}");
    println!("disk-side integrand {:.9} + {:.9} i", d_side.re, d_side.im);
    // also the first terms
    let v0 = state.v0_minus;
    let f_launch = psi0_inv(Complex64::new(v0, 0.0));
    let first = (e_iu - Complex64::i()) * (f_launch - Complex64::i()) / (e_iu - f_launch);
    println!("first {:.9} + {:.9} i   vs -2/(xi-v0) = {:.9}", first.re, first.im, -2.0/(xi - v0));

    // brute integral of the disk integrand over [2.8, 3.0] vs the IBP form
    let integrand = |th: f64| -> Complex64 {
        let (g2, gp2) = state.replay_boundary(th).unwrap();
        let x2 = BoundaryPoint::from_measure_angle(th).point();
        let gc2 = Complex64::new(g2, 0.0);
        let fx2 = psi0_inv(gc2);
        let fpx2 = psi0_inv_deriv(gc2) * gp2 * psi0_deriv(x2);
        pref * x2 * fpx2 * a / ((e_iu - fx2) * (e_iu - fx2))
    };
    let mut brute = Complex64::new(0.0, 0.0);
    let nn = 20000;
    for k in 0..nn {
        let th = 2.8 + 0.2 * (k as f64 + 0.5) / nn as f64;
        brute += integrand(th) * (0.2 / nn as f64);
    }
    let qq = |th: f64| -> Complex64 {
        let (g2, _) = state.replay_boundary(th).unwrap();
        let fx2 = psi0_inv(Complex64::new(g2, 0.0));
        Complex64::new(1.0, 0.0) / (e_iu - fx2)
    };
    let ibp = pref * (-Complex64::i()) * a * (qq(3.0) - qq(2.8));
    println!("brute {:.9} + {:.9}i", brute.re, brute.im);
    println!("ibp   {:.9} + {:.9}i", ibp.re, ibp.im);

    // replicate drift_z manually for the single-piece measure
    let q_pi2 = Complex64::new(1.0, 0.0) / (e_iu - Complex64::i());
    let q_front = Complex64::new(1.0, 0.0) / (e_iu - f_launch);
    let manual = first + pref * (-Complex64::i()) * a * (q_front - q_pi2);
    println!("manual {:.9} + {:.9}i", manual.re, manual.im);
    println!("drift_z {:.9}", state.drift_z(1e-9).unwrap());
    println!("closed  {:.9}", (a / lam - 2.0) / (xi - v0));
    // now the same arithmetic with q from replay at the ends
    let q_hi_replay = qq(4.71238898038469 - 0.0);
    let q_lo_exact = q_pi2;
    let manual2 = first + pref * (-Complex64::i()) * a * (q_hi_replay - q_lo_exact);
    println!("manual2 {:.9} + {:.9}i (q_hi from replay)", manual2.re, manual2.im);
}

#[allow(dead_code)]
fn unused() {}
