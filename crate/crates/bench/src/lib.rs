//! Fixed problem instances shared by the benchmarks.

use irs_secopt::alternating::AoOptions;
use irs_secopt::channel::{
    effective_channels, scenario_channels, ChannelSet, EffectiveChannels, ReflectVector,
    ScenarioConfig,
};
use irs_secopt::irsopt::{element_subproblem, ElementSubproblem};
use irs_secopt::secrecy::TxCovariance;
use irs_secopt::streams::stream;

/// One realization of the default deployment with `m` elements.
pub struct Fixture {
    pub scenario: ScenarioConfig,
    pub channels: ChannelSet,
    pub theta: ReflectVector,
    pub q: TxCovariance,
    pub options: AoOptions,
}

impl Fixture {
    pub fn new(m: usize) -> Self {
        let scenario = ScenarioConfig {
            m,
            ..ScenarioConfig::default()
        };
        let channels = scenario_channels(&scenario, 0).expect("default scenario is valid");
        let theta = ReflectVector::random(m, &mut stream(&[scenario.master_seed, 0]));
        let q = TxCovariance::isotropic(scenario.n_t, scenario.p_max);
        Self {
            scenario,
            channels,
            theta,
            q,
            options: AoOptions::default(),
        }
    }

    pub fn effective(&self) -> EffectiveChannels {
        effective_channels(&self.channels, &self.theta).expect("shapes agree")
    }

    pub fn subproblem(&self, element: usize) -> ElementSubproblem {
        element_subproblem(&self.channels, &self.q, &self.theta, element).expect("element in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shapes() {
        let f = Fixture::new(8);
        assert_eq!(f.channels.m(), 8);
        assert_eq!(f.effective().g_tr.shape(), (4, 4));
        assert!(f
            .subproblem(7)
            .objective(f.theta.get(7))
            .unwrap()
            .is_finite());
    }
}
