use narrowlie::enumerate::{classify, EnumConfig, NodeStatus};
use narrowlie::Field;

fn run(max_length: usize, field: Field, merge_forms: bool) -> narrowlie::enumerate::Classification {
    classify(&EnumConfig {
        max_length,
        field,
        merge_forms,
        ..EnumConfig::default()
    })
    .unwrap()
}

#[test]
fn counts_through_length_five() {
    let c = run(5, Field::Q, true);
    let counts: Vec<usize> = (2..=5).map(|l| c.classes(l).len()).collect();
    assert_eq!(counts, [1, 2, 4, 11]);
    assert!(c.warnings.is_empty(), "{:?}", c.warnings);
    // the uncatalogued length-5 classes are all dead ends
    for n in c.classes(5) {
        if n.catalog_names.is_empty() {
            assert!(n.flags.non_extendable, "#{}", n.id);
        }
    }
    let m1 = c.classes(5).into_iter().find(|n| n.catalog_names.iter().any(|x| x == "m1(5)")).unwrap();
    assert!(m1.flags.non_extendable);
}

#[test]
fn rational_forms_stay_apart_without_merging() {
    let merged = run(4, Field::Q, true);
    let split = run(4, Field::Q, false);
    assert_eq!(merged.classes(4).len(), 4);
    let forms = merged.nodes.iter().filter(|n| matches!(n.status, NodeStatus::FormOf { .. })).count();
    // each extra rational class is merged as a form; a form may also absorb
    // rational duplicates of another form
    let rational = split.classes(4).len();
    assert!(rational > 4 && rational <= 4 + forms, "{rational} rational classes, {forms} forms");
    for n in &merged.nodes {
        if let NodeStatus::FormOf { of, sqrt_of, witness } = &n.status {
            assert!(merged.nodes[*of].is_canonical());
            assert!(sqrt_of.parse::<i64>().unwrap() > 1, "real extension expected, got {sqrt_of}");
            assert_eq!(witness["sqrt_of"].as_str(), Some(sqrt_of.as_str()));
        }
    }
}

#[test]
fn duplicates_point_to_classes_of_their_level() {
    let c = run(5, Field::Q, true);
    for n in &c.nodes {
        match &n.status {
            NodeStatus::Duplicate { of, witness } => {
                let target = &c.nodes[*of];
                assert!(target.is_canonical());
                assert_eq!(target.length(), n.length());
                assert_eq!(witness.blocks.len(), n.length());
            }
            NodeStatus::FormOf { of, .. } => assert!(c.nodes[*of].is_canonical()),
            NodeStatus::Canonical => {}
        }
        if let Some(p) = n.parent {
            assert!(c.nodes[p].is_canonical(), "#{} extends a non-class", n.id);
            assert_eq!(c.nodes[p].length() + 1, n.length());
        }
    }
}

#[test]
fn json_report_lists_levels() {
    let c = run(4, Field::Q, true);
    let v = c.to_json_value();
    assert_eq!(v["levels"].as_array().unwrap().len(), 3);
    assert_eq!(v["levels"][2]["classes"], 4);
    assert_eq!(v["config"]["merge_forms"], true);
    assert_eq!(v["nodes"].as_array().unwrap().len(), c.nodes.len());
    let dot = c.to_dot();
    assert!(dot.contains("style=dotted"));
}

#[test]
fn gaussian_field_merges_more() {
    let c = run(4, Field::Qi, true);
    assert_eq!(c.classes(4).len(), 3);
    let loops = c
        .classes(4)
        .into_iter()
        .find(|n| n.catalog_names.iter().any(|x| x == "n1+(4)"))
        .unwrap();
    assert!(loops.catalog_names.iter().any(|x| x == "n1-(4)"));
}
