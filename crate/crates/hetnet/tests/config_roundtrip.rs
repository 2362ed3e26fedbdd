use hetnet::{parse_model, serialize_model};
use hetnet_core::{JointAtom, MarkLaw, NetworkModel, ScalarDistribution, TierSpec};
use proptest::prelude::*;

fn dist() -> impl Strategy<Value = ScalarDistribution> {
    prop_oneof![
        (0.1f64..10.0).prop_map(|v| ScalarDistribution::constant(v).unwrap()),
        (-2.0f64..2.0, 0.01f64..2.0).prop_map(|(m, s)| ScalarDistribution::lognormal(m, s).unwrap()),
        (0.0f64..12.0).prop_map(|db| ScalarDistribution::lognormal_mean_one_db(db.max(0.01)).unwrap()),
        (0.1f64..10.0).prop_map(|r| ScalarDistribution::exponential(r).unwrap()),
        (0.2f64..5.0, 0.1f64..5.0).prop_map(|(k, s)| ScalarDistribution::weibull(k, s).unwrap()),
        (0.5f64..5.0, 0.1f64..5.0).prop_map(|(m, o)| ScalarDistribution::nakagami(m, o).unwrap()),
        (0.0f64..5.0, 0.1f64..5.0).prop_map(|(n, s)| ScalarDistribution::rice(n, s).unwrap()),
        (0.1f64..10.0, 0.1f64..10.0).prop_map(|(a, b)| ScalarDistribution::discrete(vec![(a, 0.25), (b, 0.75)]).unwrap()),
    ]
}

fn tier() -> impl Strategy<Value = TierSpec> {
    let independent = (0.01f64..10.0, dist(), dist(), dist(), 2.01f64..8.0, dist()).prop_map(|(l, p, s, a, b, t)| {
        TierSpec::independent(l, p, s, a, ScalarDistribution::constant(b).unwrap(), t)
    });
    let joint = (0.01f64..10.0, prop::collection::vec((0.1f64..10.0, 0.1f64..10.0, 2.01f64..8.0, 1u8..4), 1..4)).prop_map(|(l, atoms)| {
        let n = atoms.len() as f64;
        let atoms = atoms
            .into_iter()
            .map(|(p, a, b, t)| JointAtom { power: p, shadowing: 1.0, pathloss_constant: a, beta: b, threshold: t as f64, probability: 1.0 / n })
            .collect();
        TierSpec { lambda: l, marks: MarkLaw::Joint(atoms) }
    });
    prop_oneof![independent, joint]
}

proptest! {
    #[test]
    fn parse_serialize_parse(tiers in prop::collection::vec(tier(), 1..4)) {
        let Ok(model) = NetworkModel::new(tiers) else { return Ok(()) };
        let text = serialize_model(&model);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(&back, &model);
        prop_assert_eq!(serialize_model(&back), text);
    }
}
