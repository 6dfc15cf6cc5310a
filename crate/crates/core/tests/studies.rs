use plasma_penalty_core::experiments::{
    blowup_refinement_study, convergence_member, convergence_study, l1_errors, run_simulation,
};
use plasma_penalty_core::{Error, PenaltyKind, Reconstruction, RunConfig};

#[test]
fn reference_problem_is_second_order() {
    let err = |cells: usize| {
        let mut cfg = RunConfig::reference(cells, 0.1).unwrap();
        cfg.t_end = 0.1;
        let sim = run_simulation(&cfg).unwrap();
        assert!(!sim.report.blew_up);
        l1_errors(&sim.field, &cfg.case, sim.t, &cfg.mesh).l1_n
    };
    let ratio = err(500) / err(1000);
    assert!(ratio >= 3.5, "ratio {ratio}");
}

#[test]
fn cut_flux_penalization_blows_up_at_the_interface() {
    let cfg = RunConfig::isoardi(1280, 1e-3, 1.0).unwrap();
    let study = blowup_refinement_study(&[1280, 2560], &cfg).unwrap();
    for r in &study.reports {
        assert!(r.blew_up, "{r:?}");
        assert!(r.peak_value > cfg.blowup_threshold);
        assert!((r.x_peak - 0.4).abs() <= 0.05, "{r:?}");
    }
    assert!(study.earlier_with_refinement, "{:?}", study.reports);
    assert!(study.closer_with_refinement, "{:?}", study.reports);
}

#[test]
fn second_order_blowup_is_also_localized() {
    let mut cfg = RunConfig::isoardi(1280, 1e-3, 1.0).unwrap();
    cfg.reconstruction = Reconstruction::Muscl;
    let study = blowup_refinement_study(&[1280, 2560], &cfg).unwrap();
    assert!(study
        .reports
        .iter()
        .all(|r| r.blew_up && (r.x_peak - 0.4).abs() <= 0.05));
    assert!(study.earlier_with_refinement && study.closer_with_refinement);
}

#[test]
fn single_field_penalization_does_not_blow_up() {
    for kind in [PenaltyKind::LinearGues, PenaltyKind::MachGues] {
        let mut cfg = RunConfig::gues(kind, 200, 1e-4, 0.1).unwrap();
        cfg.t_end = 0.2;
        let sim = run_simulation(&cfg).unwrap();
        assert!(!sim.report.blew_up, "{kind:?}: {:?}", sim.report);
        let limiter = &sim.field.interior()[cfg.mesh.first_limiter_cell() + 5..];
        assert!(
            limiter.iter().all(|u| (u.mach() - 0.9).abs() <= 1e-2),
            "{kind:?}"
        );
    }
}

#[test]
fn errors_shrink_with_eta_on_a_coarse_mesh() {
    let mut base = RunConfig::gues(PenaltyKind::LinearGues, 400, 1e-1, 0.1).unwrap();
    base.t_end = 0.5;
    let study = convergence_study(&[1e-1, 1e-2, 1e-3], &base).unwrap();
    let first = study.reports.first().unwrap().norms;
    let last = study.reports.last().unwrap().norms;
    assert!(last.l1_n < 0.1 * first.l1_n, "{:?}", study.reports);
    assert!(study.slopes.n > 0.5, "{:?}", study.slopes);
}

#[test]
fn study_aborts_on_blowup_with_the_offending_eta() {
    let base = RunConfig::isoardi(640, 1e-2, 1.0).unwrap();
    match convergence_member(&base, 1e-3) {
        Err(Error::Blowup { eta, .. }) => assert_eq!(eta, 1e-3),
        other => panic!("expected a blow-up error, got {other:?}"),
    }
}

#[test]
fn runs_are_bit_identical() {
    let mut cfg = RunConfig::gues(PenaltyKind::MachGues, 300, 1e-3, 0.1).unwrap();
    cfg.t_end = 0.1;
    let a = convergence_member(&cfg, 1e-3).unwrap();
    let b = convergence_member(&cfg, 1e-3).unwrap();
    assert_eq!(a, b);
}
