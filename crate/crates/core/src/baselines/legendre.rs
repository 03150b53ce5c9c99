/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1); the nodes never touch +-1.
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// The `N + 1` roots of `P_{N+1}` in increasing order.
///
/// Newton iteration from Chebyshev-like guesses on the non-negative half,
/// mirrored so the set is exactly symmetric.
pub fn legendre_nodes(n: usize) -> Vec<f64> {
    let m = n + 1;
    let mut upper = Vec::with_capacity(m / 2 + 1);
    for i in 0..(m + 1) / 2 {
        let mut x = (std::f64::consts::PI * (4 * i + 3) as f64 / (4 * m + 2) as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        upper.push(x);
    }
    if m % 2 == 1 {
        // Middle root of an odd-degree polynomial.
        *upper.last_mut().unwrap() = 0.0;
    }
    let mut nodes: Vec<f64> = upper.iter().map(|x| -x).collect();
    let mirrored = if m % 2 == 1 { &upper[..upper.len() - 1] } else { &upper[..] };
    nodes.extend(mirrored.iter().rev());
    nodes
}
