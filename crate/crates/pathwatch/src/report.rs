//! Output formatting: significant-digit printing, config hashing, and the
//! CSV/JSON emitters for traces and sweeps.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::simulator::{SimulationTrace, SizingSweepResult, StatusSweepResult};

/// Probabilities print with six significant digits; counts as integers.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    format!("{x:.5e}")
        .parse::<f64>()
        .map(|v| {
            // prefer plain decimal when it stays short
            if (1e-4..1e6).contains(&v.abs()) {
                let digits = 5 - v.abs().log10().floor() as i32;
                format!("{v:.*}", digits.max(0) as usize)
            } else {
                format!("{v:.5e}")
            }
        })
        .unwrap_or_else(|_| format!("{x:.5e}"))
}

/// Short deterministic hash of any serializable configuration, so every
/// emitted number can be traced back to the exact inputs that produced it.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).unwrap_or_default();
    let digest = Sha256::digest(json.as_bytes());
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

/// Trace CSV: one row per period, pinned column order.
pub fn trace_to_csv(trace: &SimulationTrace) -> String {
    let mut out = String::from("period,method,n_sampled,y_detected,alpha,beta,t_change,status\n");
    for r in &trace.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.period,
            r.method,
            r.n_sampled,
            r.y_detected,
            r.posterior_alpha,
            r.posterior_beta,
            sig6(r.t_change),
            r.status
        ));
    }
    out
}

pub fn trace_to_json(trace: &SimulationTrace) -> String {
    serde_json::to_string_pretty(trace).expect("trace serializes") + "\n"
}

pub fn status_sweep_to_csv(sweep: &StatusSweepResult) -> String {
    let mut out = String::from(
        "true_rate,iterations,green,orange,red,prop_green,prop_orange,prop_red,config_hash,seed\n",
    );
    for c in &sweep.cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            sig6(c.true_rate),
            sweep.iterations,
            c.green,
            c.orange,
            c.red,
            sig6(c.prop_green),
            sig6(c.prop_orange),
            sig6(c.prop_red),
            sweep.config_hash,
            sweep.seed
        ));
    }
    out
}

pub fn status_sweep_to_json(sweep: &StatusSweepResult) -> String {
    serde_json::to_string_pretty(sweep).expect("sweep serializes") + "\n"
}

pub fn sizing_sweep_to_csv(sweep: &SizingSweepResult) -> String {
    let mut out = String::from("axis,value,n_min,error,config_hash\n");
    for p in &sweep.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            sweep.axis,
            p.value,
            p.n_min.map(|n| n.to_string()).unwrap_or_default(),
            p.error.clone().unwrap_or_default(),
            sweep.config_hash
        ));
    }
    out
}

pub fn sizing_sweep_to_json(sweep: &SizingSweepResult) -> String {
    serde_json::to_string_pretty(sweep).expect("sweep serializes") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formats() {
        assert_eq!(sig6(0.0011177840486585485), "0.00111778");
        assert_eq!(sig6(0.95), "0.950000");
        assert_eq!(sig6(0.9505861778899615), "0.950586");
        assert_eq!(sig6(598.0), "598.000");
        assert_eq!(sig6(0.0), "0.00000");
        assert_eq!(sig6(4.9434939204086905e-88), "4.94349e-88");
    }

    #[test]
    fn config_hash_is_stable_and_input_sensitive() {
        let a = config_hash(&(1, "x", 0.5));
        let b = config_hash(&(1, "x", 0.5));
        let c = config_hash(&(2, "x", 0.5));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 12);
    }

    #[test]
    fn sizing_sweep_csv_layout() {
        use crate::simulator::{sizing_sweep, SweepAxis, SweepBase};
        let sweep = sizing_sweep(SweepAxis::TRisk, &[0.005, 0.01], &SweepBase::default());
        let csv = sizing_sweep_to_csv(&sweep);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "axis,value,n_min,error,config_hash");
        let row = lines.next().unwrap();
        assert!(row.starts_with("t_risk,0.005,757,,"), "row: {row}");
        assert_eq!(lines.count(), 1);
    }
}
