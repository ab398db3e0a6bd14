//! Bandwidth, max-min fair sharing and delay computations for links and
//! paths.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{NetworkLink, NetworkPath};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("link bandwidth must be positive, got {0}")]
    InvalidLink(f64),
    #[error("path has no links")]
    EmptyPath,
    #[error("sharing users must be >= 1 and medium throughput in (0, 1], got N_u={users}, M_th={throughput}")]
    InvalidSharing { users: u32, throughput: f64 },
    #[error("delay component must be non-negative, got {0}")]
    InvalidDelay(f64),
    #[error("transmission rate must be positive, got {0}")]
    InvalidRate(f64),
    #[error("link capacity must be positive, got {0}")]
    InvalidCapacity(f64),
    #[error("packet size must be non-negative, got {0}")]
    InvalidPacket(f64),
}

pub type Result<T> = std::result::Result<T, NetworkError>;

/// Transmission medium, used to derive propagation delay from distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Medium {
    /// Coaxial cable or optical fibre, 5 us/km.
    Wired,
    /// Microwave, 3 us/km.
    Microwave,
}

impl Medium {
    pub fn seconds_per_km(self) -> f64 {
        match self {
            Medium::Wired => 5e-6,
            Medium::Microwave => 3e-6,
        }
    }
}

pub fn propagation_delay(distance_km: f64, medium: Medium) -> f64 {
    distance_km.max(0.0) * medium.seconds_per_km()
}

/// B_WL: the slower of the two endpoint ports.
pub fn link_bandwidth(link: &NetworkLink) -> Result<f64> {
    let (a, b) = link.endpoint_bandwidths;
    for bw in [a, b] {
        if !(bw > 0.0) {
            return Err(NetworkError::InvalidLink(bw));
        }
    }
    Ok(a.min(b))
}

/// B_WP: bottleneck bandwidth along the path.
pub fn path_bandwidth(path: &NetworkPath) -> Result<f64> {
    if path.links.is_empty() {
        return Err(NetworkError::EmptyPath);
    }
    path.links
        .iter()
        .try_fold(f64::INFINITY, |acc, l| Ok(acc.min(link_bandwidth(l)?)))
}

fn check_sharing(link: &NetworkLink) -> Result<()> {
    let m = link.medium_throughput;
    if link.sharing_users == 0 || !(m > 0.0 && m <= 1.0) {
        return Err(NetworkError::InvalidSharing {
            users: link.sharing_users,
            throughput: m,
        });
    }
    Ok(())
}

/// AB_WL = (B_WL / N_u) * M_th: one user's max-min fair share of a link.
pub fn available_bandwidth(link: &NetworkLink) -> Result<f64> {
    check_sharing(link)?;
    Ok(link_bandwidth(link)? / link.sharing_users as f64 * link.medium_throughput)
}

/// AB_WP = min_i(B_WL(i) / N_u(i)) * M_th for a path-level throughput.
pub fn available_path_bandwidth(path: &NetworkPath, medium_throughput: f64) -> Result<f64> {
    if path.links.is_empty() {
        return Err(NetworkError::EmptyPath);
    }
    let mut share = f64::INFINITY;
    for link in &path.links {
        check_sharing(link)?;
        share = share.min(link_bandwidth(link)? / link.sharing_users as f64);
    }
    if !(medium_throughput > 0.0 && medium_throughput <= 1.0) {
        return Err(NetworkError::InvalidSharing {
            users: 1,
            throughput: medium_throughput,
        });
    }
    Ok(share * medium_throughput)
}

fn components(link: &NetworkLink) -> Result<[f64; 4]> {
    let c = [
        link.queuing_delay,
        link.transmission_delay,
        link.propagation_delay,
        link.processing_delay,
    ];
    if let Some(bad) = c.iter().find(|d| !(**d >= 0.0)) {
        return Err(NetworkError::InvalidDelay(*bad));
    }
    Ok(c)
}

/// N_dL = 2 (Q_d + T_d + P_d + PR_d), the round trip over one link.
pub fn link_delay(link: &NetworkLink) -> Result<f64> {
    Ok(2.0 * components(link)?.iter().sum::<f64>())
}

/// N_dP = Q_dp + T_dp + P_dp + PR_dp, each summed over the path's links.
pub fn path_delay(path: &NetworkPath) -> Result<f64> {
    if path.links.is_empty() {
        return Err(NetworkError::EmptyPath);
    }
    let mut sums = [0.0; 4];
    for link in &path.links {
        for (s, c) in sums.iter_mut().zip(components(link)?) {
            *s += c;
        }
    }
    Ok(sums.iter().sum())
}

/// PR_d = L / T_r.
pub fn processing_delay(frame_length: f64, transmission_rate: f64) -> Result<f64> {
    if !(transmission_rate > 0.0) {
        return Err(NetworkError::InvalidRate(transmission_rate));
    }
    if !(frame_length >= 0.0) {
        return Err(NetworkError::InvalidPacket(frame_length));
    }
    Ok(frame_length / transmission_rate)
}

/// Ceiling that snaps values within 1e-9 (relative) of an integer onto it,
/// so `W * sum(1/C_i)` landing on a whole number is not pushed up by
/// rounding noise.
fn snapped_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Serialization rounds for a `w`-bit packet: ceil(W * sum_i 1/C_i).
pub fn serialization_rounds(w: f64, path: &NetworkPath) -> Result<f64> {
    if !(w >= 0.0) {
        return Err(NetworkError::InvalidPacket(w));
    }
    let mut x = 0.0;
    for link in &path.links {
        if !(link.capacity > 0.0) {
            return Err(NetworkError::InvalidCapacity(link.capacity));
        }
        x += w / link.capacity;
    }
    Ok(snapped_ceil(x))
}

/// Packet delay over a path as a linear function of packet size:
/// ceil(W * sum 1/C_i) * (PR_dp + sum A_n), with the path's summed queuing
/// delay added inside the parenthesis when `with_queuing` is set.
pub fn packetized_delay(w: f64, path: &NetworkPath, with_queuing: bool) -> Result<f64> {
    if path.links.is_empty() {
        return Err(NetworkError::EmptyPath);
    }
    let rounds = serialization_rounds(w, path)?;
    let mut per_round = 0.0;
    for link in &path.links {
        let [q, _, _, pr] = components(link)?;
        if !(link.const_overhead >= 0.0) {
            return Err(NetworkError::InvalidDelay(link.const_overhead));
        }
        per_round += pr + link.const_overhead;
        if with_queuing {
            per_round += q;
        }
    }
    Ok(rounds * per_round)
}

/// Minimum fixed delay: W * sum 1/C_i + sum delta_i.
pub fn fixed_delay(w: f64, path: &NetworkPath) -> Result<f64> {
    let mut d = 0.0;
    for link in &path.links {
        if !(link.capacity > 0.0) {
            return Err(NetworkError::InvalidCapacity(link.capacity));
        }
        d += w / link.capacity + link.propagation_delay;
    }
    Ok(d)
}
