use rehf::config::{RunConfig, KEYS};

#[test]
fn empty_text_gives_defaults() {
    assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    assert_eq!(RunConfig::parse("# only a comment\n\n").unwrap(), RunConfig::default());
}

#[test]
fn text_round_trip() {
    let cfg = RunConfig { beta: 2.0, kappa0_qbar: 0.5, disorder_width: 0.02, n_cells: 3, ..RunConfig::default() };
    assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
}

#[test]
fn every_key_is_written() {
    let text = RunConfig::default().to_text();
    for k in KEYS {
        assert!(text.lines().any(|l| l.starts_with(&format!("{k} ="))), "{k} missing");
    }
}

#[test]
fn trailing_comments_are_ignored() {
    let cfg = RunConfig::parse("beta = 0.5   # cold\nn_cells=2").unwrap();
    assert_eq!(cfg.beta, 0.5);
    assert_eq!(cfg.n_cells, 2);
}

#[test]
fn bad_inputs_are_configuration_errors() {
    for (text, needle) in [
        ("beta = 1\nbeta = 2", "duplicate"),
        ("temperature = 3", "unknown key"),
        ("beta = hot", "cannot parse"),
        ("beta 1", "key = value"),
        ("beta = -1", "beta"),
        ("disorder_width = -1", "width"),
        ("mixing = 0", "mixing"),
        ("n_cells = 0", "n_cells"),
    ] {
        let e = RunConfig::parse(text).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{text}");
        assert!(e.to_string().contains(needle), "{text}: {e}");
    }
}

#[test]
fn errors_name_the_line() {
    let e = RunConfig::parse("beta = 1\n\nfoo = 2").unwrap_err();
    assert!(e.to_string().contains("line 3"), "{e}");
}

#[test]
fn derived_quantities() {
    let cfg = RunConfig { lattice_a: 2.0, kappa0_qbar: 4.0, ..RunConfig::default() };
    assert_eq!(cfg.kappa0(), 0.5);
    let g = cfg.grid().unwrap();
    assert_eq!(g.m(), cfg.n_cells * cfg.n_pts);
    let spec = cfg.disorder_spec(9).unwrap();
    assert_eq!(spec.seed, 9);
    assert_eq!(spec.width, cfg.disorder_width);
    assert_eq!(cfg.solve_config().max_iter, cfg.max_iter);
}
