//! Delay, completion-time, cost and SLA metrics computed from per-request
//! traffic counters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AppId, MetricsReport, SlaTerms, TaskId, TrafficCounters};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("cloud packets ({cloud}) exceed user packets ({user})")]
    InconsistentCounters { user: u64, cloud: u64 },
    #[error("delay time must be non-negative, got {0}")]
    InvalidDelay(f64),
}

/// A total with its per-item average. `empty` is set when the denominator
/// was zero and `avg` was reported as 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub total: f64,
    pub avg: f64,
    pub empty: bool,
}

fn averaged(total: f64, count: f64) -> Totals {
    if count > 0.0 {
        Totals {
            total,
            avg: total / count,
            empty: false,
        }
    } else {
        Totals {
            total,
            avg: 0.0,
            empty: true,
        }
    }
}

/// (TP, TIP): total user-facing and internal packet transmissions.
pub fn packet_totals(tc: &TrafficCounters) -> Result<(u64, u64), MetricsError> {
    if tc.cloud_packets > tc.user_packets {
        return Err(MetricsError::InconsistentCounters {
            user: tc.user_packets,
            cloud: tc.cloud_packets,
        });
    }
    let tp = tc.user_packets
        + tc.cloud_packets
        + tc.cloud_response_packets
        + tc.fog_response_packets
        + tc.cloud_response_packets;
    let tip = tc.internal_fog_packets + tc.internal_cloud_packets + tc.internal_response_packets;
    Ok((tp, tip))
}

/// DP_total and DP_avg (per user packet). The cloud response leg is counted
/// twice: once from the Cloud back to the Fog and once on to the user.
pub fn delay_totals(tc: &TrafficCounters) -> Totals {
    let total = tc.user_time + tc.cloud_time + tc.cloud_response_time + tc.fog_response_time + tc.cloud_response_time;
    averaged(total, tc.user_packets as f64)
}

/// DIP_total and DIP_avg (per internal Fog or Cloud communication).
pub fn internal_delay_totals(tc: &TrafficCounters) -> Totals {
    let total = tc.internal_fog_time
        + tc.internal_fog_response_time
        + tc.internal_cloud_time
        + tc.internal_cloud_response_time;
    averaged(total, (tc.internal_fog_packets + tc.internal_cloud_packets) as f64)
}

/// TPT = tP_fd + tP_fs + tP_c.
pub fn total_processing_time(tc: &TrafficCounters) -> f64 {
    tc.device_processing_time + tc.server_processing_time + tc.cloud_processing_time
}

/// CTU_avg: delay plus processing per user packet.
pub fn ctu_avg(tc: &TrafficCounters) -> Totals {
    let total = delay_totals(tc).total + internal_delay_totals(tc).total + total_processing_time(tc);
    averaged(total, tc.user_packets as f64)
}

/// One finished request as recorded by the engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestRecord {
    pub task: TaskId,
    pub app: AppId,
    pub submit_time: f64,
    pub finish_time: f64,
    /// Deadline in effect at completion, relative to submission.
    pub deadline: f64,
    pub counters: TrafficCounters,
}

impl RequestRecord {
    /// Network delay seen by the request: DP_total + DIP_total.
    pub fn delay(&self) -> f64 {
        delay_totals(&self.counters).total + internal_delay_totals(&self.counters).total
    }

    pub fn processing(&self) -> f64 {
        total_processing_time(&self.counters)
    }

    /// Time past the deadline, 0 when met.
    pub fn overrun(&self) -> f64 {
        (self.finish_time - (self.submit_time + self.deadline)).max(0.0)
    }

    pub fn violated(&self) -> bool {
        self.finish_time > self.submit_time + self.deadline
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CompletionMetrics {
    pub ctu_avg: f64,
    /// CTA for each application, in order of first appearance.
    pub cta: Vec<(AppId, f64)>,
    pub cta_avg: f64,
    /// Sum of TPT over all requests.
    pub tpt: f64,
    pub empty: bool,
}

/// CTU_avg, per-application CTA, CTA_avg and total processing time.
pub fn completion_metrics(trace: &[RequestRecord]) -> CompletionMetrics {
    let mut all = TrafficCounters::default();
    let mut cta: Vec<(AppId, f64)> = Vec::new();
    let mut tpt = 0.0;
    for r in trace {
        all.add(&r.counters);
        let one = delay_totals(&r.counters).total + internal_delay_totals(&r.counters).total + r.processing();
        tpt += r.processing();
        match cta.iter_mut().find(|(a, _)| *a == r.app) {
            Some((_, v)) => *v += one,
            None => cta.push((r.app, one)),
        }
    }
    let per_request = averaged(cta.iter().map(|(_, v)| v).fold(0.0, |a, b| a + b), trace.len() as f64);
    let ctu = ctu_avg(&all);
    CompletionMetrics {
        ctu_avg: ctu.avg,
        cta,
        cta_avg: per_request.avg,
        tpt,
        empty: per_request.empty || ctu.empty,
    }
}

/// TC_req for one request given the Fog and Cloud unit costs.
pub fn request_cost(tc: &TrafficCounters, fog_unit: f64, cloud_unit: f64) -> f64 {
    let fog_part = delay_totals(tc).total + internal_delay_totals(tc).total + total_processing_time(tc);
    let cloud_part = tc.cloud_time
        + tc.cloud_response_time
        + tc.internal_cloud_time
        + tc.internal_cloud_response_time
        + tc.cloud_processing_time;
    fog_part * fog_unit + cloud_part * cloud_unit
}

/// TC_req for every request and their sum TC. `units` gives the
/// (Fog, Cloud) unit cost for a request's application.
pub fn cost_metrics(trace: &[RequestRecord], units: impl Fn(AppId) -> (f64, f64)) -> (Vec<f64>, f64) {
    let per: Vec<f64> = trace
        .iter()
        .map(|r| {
            let (fog, cloud) = units(r.app);
            request_cost(&r.counters, fog, cloud)
        })
        .collect();
    let total = per.iter().fold(0.0, |a, b| a + b);
    (per, total)
}

/// alpha + beta * DT for one violated request.
pub fn sla_penalty(terms: &SlaTerms) -> Result<f64, MetricsError> {
    if !(terms.delay_time >= 0.0) {
        return Err(MetricsError::InvalidDelay(terms.delay_time));
    }
    Ok(terms.base_penalty + terms.penalty_rate * terms.delay_time)
}

/// Percentage of requests that finished after their deadline.
pub fn sla_violation_rate(trace: &[RequestRecord]) -> f64 {
    if trace.is_empty() {
        return 0.0;
    }
    let violated = trace.iter().filter(|r| r.violated()).count();
    violated as f64 / trace.len() as f64 * 100.0
}

/// Summed penalty over all violated requests.
pub fn total_penalty(trace: &[RequestRecord], terms: &SlaTerms) -> f64 {
    trace
        .iter()
        .filter(|r| r.violated())
        .map(|r| {
            let t = SlaTerms {
                delay_time: r.overrun(),
                ..terms.clone()
            };
            sla_penalty(&t).unwrap_or(0.0)
        })
        .fold(0.0, |a, b| a + b)
}

/// Delay and processing aggregates over a trace; the rest of the report is
/// filled by the caller.
pub fn summarize(trace: &[RequestRecord], terms: &SlaTerms) -> MetricsReport {
    let mut report = MetricsReport {
        requests: trace.len(),
        ..MetricsReport::default()
    };
    if trace.is_empty() {
        report.empty = true;
        return report;
    }
    let delays: Vec<f64> = trace.iter().map(RequestRecord::delay).collect();
    report.total_delay = delays.iter().sum();
    report.avg_delay = report.total_delay / delays.len() as f64;
    report.max_delay = delays.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    report.min_delay = delays.iter().copied().fold(f64::INFINITY, f64::min);
    // the mean of identical values can round a hair outside [min, max]
    report.avg_delay = report.avg_delay.clamp(report.min_delay, report.max_delay);
    report.avg_processing = trace.iter().map(RequestRecord::processing).sum::<f64>() / trace.len() as f64;

    let completion = completion_metrics(trace);
    report.ctu_avg = completion.ctu_avg;
    report.cta = completion.cta.iter().map(|(_, v)| *v).collect();
    report.cta_avg = completion.cta_avg;
    report.sla_violation_pct = sla_violation_rate(trace);
    report.penalty_cost = total_penalty(trace, terms);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mirrored(user: u64, cloud: u64) -> TrafficCounters {
        TrafficCounters {
            user_packets: user,
            cloud_packets: cloud,
            cloud_response_packets: cloud,
            fog_response_packets: user - cloud,
            ..TrafficCounters::default()
        }
    }

    #[test]
    fn packet_totals_examples() {
        assert_eq!(packet_totals(&mirrored(10, 2)).unwrap().0, 24);
        assert_eq!(packet_totals(&mirrored(7, 0)).unwrap().0, 14);
        assert_eq!(packet_totals(&mirrored(0, 0)).unwrap().0, 0);
        let bad = TrafficCounters {
            user_packets: 1,
            cloud_packets: 2,
            ..TrafficCounters::default()
        };
        assert!(matches!(packet_totals(&bad), Err(MetricsError::InconsistentCounters { .. })));
    }

    #[test]
    fn internal_packet_total() {
        let tc = TrafficCounters {
            internal_fog_packets: 3,
            internal_cloud_packets: 1,
            internal_response_packets: 4,
            ..TrafficCounters::default()
        };
        assert_eq!(packet_totals(&tc).unwrap().1, 8);
    }

    #[test]
    fn delay_totals_examples() {
        let tc = TrafficCounters {
            user_time: 10.0,
            cloud_time: 2.0,
            cloud_response_time: 2.0,
            fog_response_time: 8.0,
            ..mirrored(10, 2)
        };
        let d = delay_totals(&tc);
        assert_eq!(d.total, 24.0);
        assert!((d.avg - 2.4).abs() < 1e-12);

        let zero = delay_totals(&mirrored(3, 1));
        assert_eq!((zero.total, zero.avg), (0.0, 0.0));

        let only = TrafficCounters {
            user_time: 3.5,
            user_packets: 1,
            ..TrafficCounters::default()
        };
        assert_eq!(delay_totals(&only).total, 3.5);

        let empty = delay_totals(&TrafficCounters::default());
        assert!(empty.empty);
        assert_eq!(empty.avg, 0.0);
    }

    #[test]
    fn internal_delay_examples() {
        let tc = TrafficCounters {
            internal_fog_time: 1.0,
            internal_fog_response_time: 1.0,
            internal_cloud_time: 2.0,
            internal_cloud_response_time: 2.0,
            internal_fog_packets: 2,
            internal_cloud_packets: 1,
            ..TrafficCounters::default()
        };
        let d = internal_delay_totals(&tc);
        assert_eq!(d.total, 6.0);
        assert_eq!(d.avg, 2.0);

        assert_eq!(internal_delay_totals(&TrafficCounters::default()).total, 0.0);

        let fog_only = TrafficCounters {
            internal_fog_time: 0.4,
            internal_fog_response_time: 0.2,
            internal_fog_packets: 2,
            ..TrafficCounters::default()
        };
        let d = internal_delay_totals(&fog_only);
        assert!((d.total - 0.6).abs() < 1e-12);
    }

    fn record(app: u32, tc: TrafficCounters) -> RequestRecord {
        RequestRecord {
            task: TaskId(0),
            app: AppId(app),
            submit_time: 0.0,
            finish_time: 1.0,
            deadline: 5.0,
            counters: tc,
        }
    }

    fn sample_counters() -> TrafficCounters {
        TrafficCounters {
            user_time: 0.5,
            fog_response_time: 0.25,
            internal_fog_time: 0.1,
            internal_fog_response_time: 0.1,
            device_processing_time: 2.0,
            internal_fog_packets: 1,
            ..mirrored(1, 0)
        }
    }

    #[test]
    fn single_request_cta_is_sum_of_parts() {
        let tc = sample_counters();
        let m = completion_metrics(&[record(0, tc.clone())]);
        let expected = delay_totals(&tc).total + internal_delay_totals(&tc).total + total_processing_time(&tc);
        assert!((m.cta[0].1 - expected).abs() < 1e-12);
        assert!((m.cta_avg - expected).abs() < 1e-12);
    }

    #[test]
    fn doubling_requests_doubles_cta_not_average() {
        let one = completion_metrics(&[record(0, sample_counters())]);
        let two = completion_metrics(&[record(0, sample_counters()), record(0, sample_counters())]);
        assert!((two.cta[0].1 - 2.0 * one.cta[0].1).abs() < 1e-12);
        assert!((two.cta_avg - one.cta_avg).abs() < 1e-12);
    }

    #[test]
    fn cost_examples() {
        assert_eq!(request_cost(&TrafficCounters::default(), 1.0, 1.0), 0.0);
        let tc = sample_counters();
        let bracket = 0.5 + 0.25 + 0.2 + 2.0;
        assert!((request_cost(&tc, 1.0, 1.0) - bracket).abs() < 1e-12);
        let trace: Vec<_> = (0..4).map(|_| record(0, tc.clone())).collect();
        let (per, total) = cost_metrics(&trace, |_| (1.0, 1.0));
        assert_eq!(per.len(), 4);
        assert!((total - 4.0 * per[0]).abs() < 1e-12);
    }

    #[test]
    fn penalty_examples() {
        let t = SlaTerms {
            base_penalty: 0.1,
            penalty_rate: 0.05,
            delay_time: 2.0,
        };
        assert!((sla_penalty(&t).unwrap() - 0.2).abs() < 1e-12);
        let t0 = SlaTerms { delay_time: 0.0, ..t.clone() };
        assert_eq!(sla_penalty(&t0).unwrap(), 0.1);
        let neg = SlaTerms { delay_time: -1.0, ..t };
        assert_eq!(sla_penalty(&neg), Err(MetricsError::InvalidDelay(-1.0)));
    }

    #[test]
    fn no_violations_no_penalty() {
        let trace = vec![record(0, sample_counters())];
        assert_eq!(sla_violation_rate(&trace), 0.0);
        assert_eq!(total_penalty(&trace, &SlaTerms::default()), 0.0);
        assert_eq!(sla_violation_rate(&[]), 0.0);
    }

    #[test]
    fn empty_trace_reports_zeros() {
        let r = summarize(&[], &SlaTerms::default());
        assert!(r.empty);
        assert_eq!((r.total_delay, r.avg_delay, r.max_delay, r.min_delay), (0.0, 0.0, 0.0, 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn penalty_monotone_in_delay(a in 0.0..10.0f64, b in 0.0..10.0f64, d1 in 0.0..100.0f64, d2 in 0.0..100.0f64) {
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            let p = |dt| sla_penalty(&SlaTerms { base_penalty: a, penalty_rate: b, delay_time: dt }).unwrap();
            prop_assert!(p(lo) <= p(hi));
        }

        #[test]
        fn violation_rate_ignores_order(finishes in prop::collection::vec(0.0..10.0f64, 1..30), rot in 0usize..30) {
            let mut trace: Vec<RequestRecord> = finishes
                .iter()
                .map(|&f| RequestRecord { finish_time: f, ..record(0, TrafficCounters::default()) })
                .collect();
            let before = sla_violation_rate(&trace);
            let k = rot % trace.len();
            trace.rotate_left(k);
            trace.reverse();
            prop_assert_eq!(before, sla_violation_rate(&trace));
        }

        #[test]
        fn min_avg_max_ordered(delays in prop::collection::vec(0.0..50.0f64, 1..40)) {
            let trace: Vec<RequestRecord> = delays
                .iter()
                .map(|&d| record(0, TrafficCounters { user_time: d, user_packets: 1, ..TrafficCounters::default() }))
                .collect();
            let r = summarize(&trace, &SlaTerms::default());
            prop_assert!(r.min_delay <= r.avg_delay && r.avg_delay <= r.max_delay);
        }
    }
}
