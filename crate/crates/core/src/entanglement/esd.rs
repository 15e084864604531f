use super::ConcurrenceSeries;
use crate::error::{Error, Result};

/// Concurrence below this is treated as zero.
pub const ESD_THRESHOLD: f64 = 1e-9;

/// Largest change between consecutive samples the detector accepts.
pub const MAX_SAMPLE_JUMP: f64 = 0.05;

/// An isolated minimum counts as a zero when the V fitted through it
/// bottoms out below this fraction of its arms.
const TOUCH_VERTEX_FRACTION: f64 = 0.05;

/// A death of entanglement at `death`, followed by a revival at `revival`
/// unless the concurrence stays zero to the end of the series. A tangential
/// zero has `revival == Some(death)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EsdEvent {
    pub death: f64,
    pub revival: Option<f64>,
}

fn crossing_time(t0: f64, c0: f64, t1: f64, c1: f64) -> f64 {
    if c0 == c1 {
        return t0;
    }
    let frac = ((c0 - ESD_THRESHOLD) / (c0 - c1)).clamp(0.0, 1.0);
    t0 + frac * (t1 - t0)
}

/// Vertex of the symmetric V through three samples around a local minimum of
/// `y`. The steeper side fixes the slope.
fn v_vertex(t: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let slope_left = (y[0] - y[1]) / (t[1] - t[0]);
    let slope_right = (y[2] - y[1]) / (t[2] - t[1]);
    if slope_left >= slope_right {
        let a = slope_left;
        let tv = (y[1] - y[2]) / (2.0 * a) + (t[1] + t[2]) / 2.0;
        (tv, y[1] - a * (tv - t[1]))
    } else {
        let a = slope_right;
        let tv = (y[0] - y[1]) / (2.0 * a) + (t[0] + t[1]) / 2.0;
        (tv, y[1] + a * (tv - t[1]))
    }
}

/// Finds the intervals where the concurrence vanishes.
///
/// Two shapes are recognized: runs of samples below [`ESD_THRESHOLD`]
/// (entry and exit located by linear interpolation), and isolated tangential
/// zeros that fall between samples. The latter are found at strict local
/// minima of `sqrt(C)`, where a concurrence touching zero looks like `|t - t0|`.
pub fn detect_esd(series: &ConcurrenceSeries) -> Result<Vec<EsdEvent>> {
    let (t, c) = (&series.taus, &series.values);
    if t.len() != c.len() || t.len() < 3 {
        return Err(Error::invalid("ESD detection needs at least three aligned samples"));
    }
    let max_jump = c.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    if max_jump >= MAX_SAMPLE_JUMP {
        return Err(Error::Undersampled { max_jump, limit: MAX_SAMPLE_JUMP });
    }

    let is_zero: Vec<bool> = c.iter().map(|&v| v < ESD_THRESHOLD).collect();
    let mut events = Vec::new();
    let mut i = 0;
    while i < c.len() {
        if !is_zero[i] {
            if i > 0 && i + 1 < c.len() && !is_zero[i - 1] && !is_zero[i + 1] && c[i] < c[i - 1] && c[i] <= c[i + 1] {
                let y = [c[i - 1].sqrt(), c[i].sqrt(), c[i + 1].sqrt()];
                let (tv, yv) = v_vertex([t[i - 1], t[i], t[i + 1]], y);
                if yv <= TOUCH_VERTEX_FRACTION * y[0].min(y[2]) {
                    events.push(EsdEvent { death: tv, revival: Some(tv) });
                }
            }
            i += 1;
            continue;
        }
        let start = i;
        while i < c.len() && is_zero[i] {
            i += 1;
        }
        // A series that opens at zero has no death to report.
        if start == 0 {
            continue;
        }
        let death = crossing_time(t[start - 1], c[start - 1], t[start], c[start]);
        let revival = (i < c.len()).then(|| {
            let (t0, c0, t1, c1) = (t[i - 1], c[i - 1], t[i], c[i]);
            // mirror of the entry crossing
            t1 - (t1 - t0) * ((c1 - ESD_THRESHOLD) / (c1 - c0)).clamp(0.0, 1.0)
        });
        events.push(EsdEvent { death, revival });
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::PairClass;

    fn series(taus: Vec<f64>, values: Vec<f64>) -> ConcurrenceSeries {
        ConcurrenceSeries { pair: PairClass::Kl, taus, values }
    }

    #[test]
    fn monotone_positive_has_no_events() {
        let taus: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let values = taus.iter().map(|t| 0.5 * (-0.1 * t).exp()).collect();
        assert!(detect_esd(&series(taus, values)).unwrap().is_empty());
    }

    #[test]
    fn undersampled_is_refused() {
        let s = series(vec![0.0, 1.0, 2.0], vec![0.5, 0.0, 0.5]);
        assert!(matches!(detect_esd(&s), Err(Error::Undersampled { .. })));
    }

    #[test]
    fn finite_dead_interval_with_revival() {
        // max(0, |t - 5| - 1) scaled: zero on [4, 6].
        let taus: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
        let values = taus.iter().map(|&t| 0.02 * ((t - 5.0).abs() - 1.0).max(0.0)).collect();
        let ev = detect_esd(&series(taus, values)).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0].death - 4.0).abs() < 1e-6);
        assert!((ev[0].revival.unwrap() - 6.0).abs() < 1e-6);
    }

    #[test]
    fn death_without_revival() {
        let taus: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let values = taus.iter().map(|&t| (0.01 * (5.0 - t)).max(0.0)).collect();
        let ev = detect_esd(&series(taus, values)).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0].death - 5.0).abs() < 1e-6);
        assert_eq!(ev[0].revival, None);
    }

    #[test]
    fn tangential_zero_between_samples() {
        let t0 = 1.234_567;
        let taus: Vec<f64> = (0..=300).map(|i| i as f64 * 0.01).collect();
        let values = taus.iter().map(|&t| 0.3 * (t - t0).powi(2)).collect();
        let ev = detect_esd(&series(taus, values)).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0].death - t0).abs() < 1e-9);
        assert_eq!(ev[0].revival, Some(ev[0].death));
    }

    #[test]
    fn smooth_positive_minimum_is_not_a_zero() {
        let taus: Vec<f64> = (0..=300).map(|i| i as f64 * 0.01).collect();
        let values = taus.iter().map(|&t| 1e-4 + 0.3 * (t - 1.5).powi(2)).collect();
        assert!(detect_esd(&series(taus, values)).unwrap().is_empty());
    }
}
