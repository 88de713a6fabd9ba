use stratmap::pipeline::{mine, PipelineConfig};
use stratmap::sim::{parse_mix, simulate, Archetype, SimConfig};
use stratmap::{fixtures, Rate};

fn core() -> Vec<String> {
    vec!["array".into(), "pointer".into()]
}

fn population(seed: u64, interleave: f64) -> SimConfig {
    let mut c = SimConfig::new(core(), 300, parse_mix("DCD=0.313,CDD=0.31,DDC=0.316,NOISE=0.061").unwrap(), seed);
    c.interleave_prob = interleave;
    c
}

#[test]
fn simulation_is_deterministic() {
    let km = fixtures::c_course_map();
    let a = simulate(&km, &population(7, 0.05)).unwrap();
    let b = simulate(&km, &population(7, 0.05)).unwrap();
    let c = simulate(&km, &population(8, 0.05)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn planted_shares_are_recovered() {
    let km = fixtures::c_course_map();
    for seed in [1, 2, 42] {
        let events = simulate(&km, &population(seed, 0.05)).unwrap();
        let report = mine(&km, events, &PipelineConfig::new(core())).unwrap().report;
        let names: Vec<&str> = report.patterns.iter().map(|p| p.name.as_str()).collect();
        for (name, target) in [
            ("Description-Comparison-Description", 31.3),
            ("Comparison-Description-Description", 31.0),
            ("Description-Description-Comparison", 31.6),
        ] {
            let pct = report.pattern_pct(name).unwrap_or_else(|| panic!("{name} missing in {names:?}"));
            assert!((pct - target).abs() <= 5.0, "seed {seed}: {name} at {pct}");
        }
        assert_eq!(report.patterns.len(), 3, "seed {seed}: {names:?}");
        assert!(report.unmatched_pct <= 12.0);
    }
}

#[test]
fn clean_runs_follow_stage_order() {
    let km = fixtures::c_course_map();
    for archetype in [Archetype::Dcd, Archetype::Cdd, Archetype::Ddc] {
        let mix = vec![(archetype, Rate::from_integer(1))];
        let events = simulate(&km, &SimConfig::new(core(), 20, mix, 3)).unwrap();
        let report = mine(&km, events, &PipelineConfig::new(core())).unwrap().report;
        assert_eq!(report.patterns.len(), 1);
        assert_eq!(Some(report.patterns[0].name.as_str()), archetype.pattern_name());
        assert_eq!(report.patterns[0].count, 20);
    }
}
