//! Forward Euler integration of one value with instantaneous jumps, as a
//! reference for closed-form trajectories.

pub struct Jump {
    pub time: f64,
    pub apply: fn(f64) -> f64,
}

/// Integrates `dx/dt = rate(t)` from `x0` at time 0 with step `h`, applying
/// each jump when its time is reached, and records `x` at every probe time.
/// A probe at a jump time sees the value after the jump.
pub fn integrate(x0: f64, rate: impl Fn(f64) -> f64, jumps: &[Jump], probes: &[f64], h: f64) -> Vec<f64> {
    let end = probes.iter().copied().fold(0.0, f64::max);
    let mut events: Vec<f64> = jumps.iter().map(|j| j.time).chain(probes.iter().copied()).collect();
    events.sort_by(f64::total_cmp);
    events.dedup();
    let mut x = x0;
    let mut t = 0.0;
    let mut out = vec![f64::NAN; probes.len()];
    for e in events {
        while t < e {
            let step = h.min(e - t);
            x += step * rate(t);
            t += step;
        }
        t = e;
        for j in jumps.iter().filter(|j| j.time == e) {
            x = (j.apply)(x);
        }
        for (k, p) in probes.iter().enumerate() {
            if *p == e {
                out[k] = x;
            }
        }
        if e >= end {
            break;
        }
    }
    out
}
