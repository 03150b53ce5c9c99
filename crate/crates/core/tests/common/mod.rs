//! Method-of-lines solver for `u_t + (u^2/2)_x = nu u_xx` on `[-1, 1]` with
//! `u(x, 0) = -sin(pi x)` and `u(+-1, t) = 0`.
//!
//! The initial condition is odd about both boundaries, so the Dirichlet
//! problem coincides with the 2-periodic one; the ghost values of the
//! periodic grid are the odd reflections. Fourth-order central differences
//! in conservative flux form, classical RK4 in time.

#![allow(dead_code)]

pub struct FdSolution {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

pub fn burgers_fd(points: usize, nu: f64, t_end: f64, dt_max: f64) -> FdSolution {
    let h = 2.0 / points as f64;
    let x: Vec<f64> = (0..points).map(|i| -1.0 + h * i as f64).collect();
    let mut u: Vec<f64> = x.iter().map(|&v| -(std::f64::consts::PI * v).sin()).collect();
    let steps = (t_end / dt_max).ceil() as usize;
    let dt = t_end / steps as f64;
    let m = points;
    let rhs = |u: &[f64], out: &mut [f64]| {
        let at = |i: isize| u[i.rem_euclid(m as isize) as usize];
        for i in 0..m {
            let i = i as isize;
            let flux = |j: isize| 0.5 * at(j) * at(j);
            let dflux = (8.0 * (flux(i + 1) - flux(i - 1)) - (flux(i + 2) - flux(i - 2))) / (12.0 * h);
            let lap = (16.0 * (at(i + 1) + at(i - 1)) - (at(i + 2) + at(i - 2)) - 30.0 * at(i)) / (12.0 * h * h);
            out[i as usize] = -dflux + nu * lap;
        }
    };
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut tmp = vec![0.0; m];
    for _ in 0..steps {
        rhs(&u, &mut k1);
        for i in 0..m {
            tmp[i] = u[i] + 0.5 * dt * k1[i];
        }
        rhs(&tmp, &mut k2);
        for i in 0..m {
            tmp[i] = u[i] + 0.5 * dt * k2[i];
        }
        rhs(&tmp, &mut k3);
        for i in 0..m {
            tmp[i] = u[i] + dt * k3[i];
        }
        rhs(&tmp, &mut k4);
        for i in 0..m {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    FdSolution { x, u }
}
