//! Hartree atomic units and the conversions used at the presentation layer.

/// One atomic unit of time in seconds (ħ / E_h).
pub const AU_TIME_SECONDS: f64 = 2.4188843265857e-17;

pub fn ps_to_au(ps: f64) -> f64 {
    ps * 1e-12 / AU_TIME_SECONDS
}

pub fn au_to_ps(t: f64) -> f64 {
    t * AU_TIME_SECONDS * 1e12
}

pub fn au_to_ns(t: f64) -> f64 {
    t * AU_TIME_SECONDS * 1e9
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let t = ps_to_au(8.0);
        assert!((t - 330_730.986_681_456_9).abs() < 1e-6);
        assert!((au_to_ps(t) - 8.0).abs() < 1e-13);
        assert!((au_to_ns(t) - 0.008).abs() < 1e-16);
    }
}
