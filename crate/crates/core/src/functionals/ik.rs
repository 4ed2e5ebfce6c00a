use crate::quantization::{log_base_entry, HermForm};

/// I_k(H) = log det H − log det Hilb_k(0).
pub fn i_k(h: &HermForm) -> f64 {
    let k = h.k();
    h.log_det() - (0..=k).map(|j| log_base_entry(k, j)).sum::<f64>()
}
