use netzero_cli::model_file::{AgentSpec, CouplingSpec, HomogeneousSpec, Rows};
use netzero_cli::{parse_model_str, serialize_model, ModelFile};
use proptest::prelude::*;

fn rows(r: usize, c: usize) -> impl Strategy<Value = Rows> {
    prop::collection::vec(prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, c), r)
}

fn agent() -> impl Strategy<Value = AgentSpec> {
    (1usize..4).prop_flat_map(|n| (rows(n, n), rows(n, 1), rows(1, n)).prop_map(|(a, b, c)| AgentSpec { a, b, c }))
}

fn model_file() -> impl Strategy<Value = ModelFile> {
    (1usize..4, any::<bool>(), any::<bool>()).prop_flat_map(|(n, shorthand, circulant)| {
        let agents = prop::collection::vec(agent(), n);
        let first_row = prop::collection::vec(prop::num::f64::NORMAL, n);
        (agents, rows(n, n), first_row, rows(n, 1), rows(1, n), rows(1, 1)).prop_map(
            move |(agents, l, first_row, r, s, d)| {
                let coupling = if circulant {
                    CouplingSpec { l: None, circulant: Some(first_row), r, s, d }
                } else {
                    CouplingSpec { l: Some(l), circulant: None, r, s, d }
                };
                if shorthand {
                    let agent = agents[0].clone();
                    ModelFile { agents: None, homogeneous: Some(HomogeneousSpec { agent, count: n }), coupling }
                } else {
                    ModelFile { agents: Some(agents), homogeneous: None, coupling }
                }
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn serialized_models_parse_back_exactly(file in model_file()) {
        let text = serialize_model(&file);
        prop_assert_eq!(parse_model_str(&text).unwrap(), file);
    }
}

#[test]
fn example_models_round_trip() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("models");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let (file, model) = netzero_cli::parse_model(&path).unwrap();
        let again = parse_model_str(&serialize_model(&file)).unwrap();
        assert_eq!(again, file);
        assert_eq!(again.to_model().unwrap(), model, "{}", path.display());
    }
}
