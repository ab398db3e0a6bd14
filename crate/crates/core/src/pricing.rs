//! Tiered usage cost: connectivity, messaging, registry/shadow and rule
//! processing. Fog-server usage is billed at `1/FS_x` and Fog-device usage
//! at `1/FD_x` of the Cloud price.

use thiserror::Error;

use crate::model::{Batch, PerTier, PriceBook, UsageLedger};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("data unit must be positive, got {0} KB")]
    InvalidUnit(f64),
}

const PER_MILLION: f64 = 1e-6;

fn tiered<T>(usage: &PerTier<T>, prices: &PriceBook, f: impl Fn(&T) -> f64) -> f64 {
    f(&usage.cloud) + f(&usage.server) / prices.server_divisor + f(&usage.device) / prices.device_divisor
}

fn chargeable_units(batches: &[Batch], unit_kb: f64) -> f64 {
    batches
        .iter()
        .map(|b| (b.size_kb / unit_kb).ceil() * b.count as f64)
        .fold(0.0, |a, b| a + b)
}

fn check_unit(prices: &PriceBook) -> Result<(), PricingError> {
    if prices.data_unit > 0.0 {
        Ok(())
    } else {
        Err(PricingError::InvalidUnit(prices.data_unit))
    }
}

/// C_total.
pub fn connectivity_cost(ledger: &UsageLedger, prices: &PriceBook) -> f64 {
    prices.connectivity_unit * tiered(&ledger.connectivity_minutes, prices, |m| *m) * PER_MILLION
}

/// M_total. Each message is billed in whole `U`-sized units.
pub fn messaging_cost(ledger: &UsageLedger, prices: &PriceBook) -> Result<f64, PricingError> {
    check_unit(prices)?;
    let units = tiered(&ledger.messages, prices, |b| chargeable_units(b, prices.data_unit));
    Ok(prices.messaging_unit * units * PER_MILLION)
}

/// S_total, billed on raw KB.
pub fn registry_cost(ledger: &UsageLedger, prices: &PriceBook) -> f64 {
    prices.registry_unit * tiered(&ledger.registry_kb, prices, |kb| *kb) * PER_MILLION
}

/// P_total, same shape as messaging.
pub fn processing_cost(ledger: &UsageLedger, prices: &PriceBook) -> Result<f64, PricingError> {
    check_unit(prices)?;
    let units = tiered(&ledger.processing, prices, |b| chargeable_units(b, prices.data_unit));
    Ok(prices.processing_unit * units * PER_MILLION)
}

/// AT_cost = C_total + M_total + P_total. Registry usage is not billed here.
pub fn total_app_cost(ledger: &UsageLedger, prices: &PriceBook) -> Result<f64, PricingError> {
    Ok(connectivity_cost(ledger, prices) + messaging_cost(ledger, prices)? + processing_cost(ledger, prices)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Tier;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn connectivity_examples() {
        let p = PriceBook::default();
        let mut l = UsageLedger::default();
        l.add_connectivity(Tier::Cloud, 1e6);
        assert!(close(connectivity_cost(&l, &p), 0.08));

        let mut l = UsageLedger::default();
        l.add_connectivity(Tier::FogServer, 2e6);
        assert!(close(connectivity_cost(&l, &p), 0.08));

        assert_eq!(connectivity_cost(&UsageLedger::default(), &p), 0.0);
    }

    #[test]
    fn messaging_examples() {
        let p = PriceBook::default();
        let mut l = UsageLedger::default();
        l.add_messages(Tier::Cloud, 5.0, 1_000_000);
        assert!(close(messaging_cost(&l, &p).unwrap(), 1.00));

        let mut l = UsageLedger::default();
        l.add_messages(Tier::Cloud, 7.0, 1_000_000);
        assert!(close(messaging_cost(&l, &p).unwrap(), 2.00));

        assert_eq!(messaging_cost(&UsageLedger::default(), &p).unwrap(), 0.0);
    }

    #[test]
    fn messaging_per_message_ceil_matches_expanded_list() {
        // one batch of n equals n single-message batches
        let p = PriceBook::default();
        let mut batched = UsageLedger::default();
        batched.add_messages(Tier::FogDevice, 11.0, 3);
        let mut single = UsageLedger::default();
        for _ in 0..3 {
            single.add_messages(Tier::FogDevice, 11.0, 1);
        }
        assert_eq!(messaging_cost(&batched, &p), messaging_cost(&single, &p));
    }

    #[test]
    fn zero_unit_is_rejected() {
        let p = PriceBook {
            data_unit: 0.0,
            ..PriceBook::default()
        };
        let l = UsageLedger::default();
        assert_eq!(messaging_cost(&l, &p), Err(PricingError::InvalidUnit(0.0)));
        assert_eq!(processing_cost(&l, &p), Err(PricingError::InvalidUnit(0.0)));
    }

    #[test]
    fn registry_examples() {
        let p = PriceBook::default();
        let mut l = UsageLedger::default();
        l.add_registry(Tier::Cloud, 1e6);
        assert!(close(registry_cost(&l, &p), 1.25));

        let mut l = UsageLedger::default();
        l.add_registry(Tier::FogDevice, 3e6);
        assert!(close(registry_cost(&l, &p), 1.25));

        assert_eq!(registry_cost(&UsageLedger::default(), &p), 0.0);
    }

    #[test]
    fn processing_examples() {
        let p = PriceBook::default();
        let mut l = UsageLedger::default();
        l.add_processing(Tier::Cloud, 5.0, 1_000_000);
        assert!(close(processing_cost(&l, &p).unwrap(), 0.15));

        let mut l = UsageLedger::default();
        l.add_processing(Tier::FogDevice, 5.0, 3_000_000);
        assert!(close(processing_cost(&l, &p).unwrap(), 0.15));

        assert_eq!(processing_cost(&UsageLedger::default(), &p).unwrap(), 0.0);
    }

    #[test]
    fn total_cost_excludes_registry() {
        let p = PriceBook::default();
        let mut l = UsageLedger::default();
        l.add_connectivity(Tier::Cloud, 1e6);
        l.add_messages(Tier::Cloud, 5.0, 1_000_000);
        l.add_processing(Tier::Cloud, 5.0, 1_000_000);
        assert!(close(total_app_cost(&l, &p).unwrap(), 1.23));

        assert_eq!(total_app_cost(&UsageLedger::default(), &p).unwrap(), 0.0);

        let mut registry_only = UsageLedger::default();
        registry_only.add_registry(Tier::Cloud, 5e6);
        assert_eq!(total_app_cost(&registry_only, &p).unwrap(), 0.0);
    }

    fn tier() -> impl Strategy<Value = Tier> {
        prop_oneof![Just(Tier::Cloud), Just(Tier::FogServer), Just(Tier::FogDevice)]
    }

    fn ledger() -> impl Strategy<Value = UsageLedger> {
        let entry = (tier(), 0.0..1e4f64, 0.0..64.0f64, 0u64..1000, 0.0..100.0f64);
        prop::collection::vec(entry, 0..8).prop_map(|entries| {
            let mut l = UsageLedger::default();
            for (t, minutes, kb, count, reg) in entries {
                l.add_connectivity(t, minutes);
                l.add_messages(t, kb, count);
                l.add_processing(t, kb, count);
                l.add_registry(t, reg);
            }
            l
        })
    }

    fn all_costs(l: &UsageLedger, p: &PriceBook) -> [f64; 4] {
        [
            connectivity_cost(l, p),
            messaging_cost(l, p).unwrap(),
            registry_cost(l, p),
            processing_cost(l, p).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn costs_are_additive(a in ledger(), b in ledger()) {
            let p = PriceBook::default();
            let mut ab = a.clone();
            ab.merge(&b);
            let (ca, cb, cab) = (all_costs(&a, &p), all_costs(&b, &p), all_costs(&ab, &p));
            for i in 0..4 {
                prop_assert!((cab[i] - (ca[i] + cb[i])).abs() <= 1e-9 * cab[i].max(1.0));
            }
        }

        #[test]
        fn adding_usage_never_lowers_cost(a in ledger(), b in ledger()) {
            let p = PriceBook::default();
            let mut ab = a.clone();
            ab.merge(&b);
            let (ca, cab) = (all_costs(&a, &p), all_costs(&ab, &p));
            for i in 0..4 {
                prop_assert!(cab[i] + 1e-12 >= ca[i]);
            }
        }

        #[test]
        fn cloud_costs_at_least_server_at_least_device(
            minutes in 0.0..1e6f64, kb in 0.0..100.0f64, count in 0u64..10_000,
        ) {
            let p = PriceBook::default();
            let cost_at = |t: Tier| {
                let mut l = UsageLedger::default();
                l.add_connectivity(t, minutes);
                l.add_messages(t, kb, count);
                l.add_processing(t, kb, count);
                l.add_registry(t, kb);
                all_costs(&l, &p)
            };
            let (c, s, d) = (cost_at(Tier::Cloud), cost_at(Tier::FogServer), cost_at(Tier::FogDevice));
            for i in 0..4 {
                prop_assert!(c[i] >= s[i] && s[i] >= d[i]);
            }
        }
    }
}
