use super::*;
use crate::error::EdgeError;
use crate::mourre::fixture::branches;
use crate::packet::{evolve_free, make_packet, PacketShape, WavePacket};
use num_complex::Complex64;

fn small_grid() -> SimGrid {
    SimGrid::new(140, 64, 14.0, 32.0).unwrap()
}

fn gaussian(center: f64, width: f64) -> WavePacket {
    make_packet(0, PacketShape::Gaussian { center, width }, branches()).unwrap()
}

fn embedded(grid: SimGrid, p: &WavePacket) -> FieldState {
    embed_packet(p, grid, 0.5 * grid.ly, &RowFft::new(grid.ny)).unwrap()
}

#[test]
fn embedded_packet_is_normalized_and_centered() {
    let grid = small_grid();
    let s = embedded(grid, &gaussian(0.5, 0.3));
    assert!((s.norm_sqr() - 1.0).abs() < 1e-6);
    assert!((s.y_circular_mean() - 16.0).abs() < 1e-6);
    for k in 0..grid.ny {
        assert_eq!(s.at(0, k), Complex64::new(0.0, 0.0));
        assert_eq!(s.at(grid.nx, k), Complex64::new(0.0, 0.0));
    }
}

#[test]
fn norm_is_conserved_with_impurities() {
    let grid = small_grid();
    let w = generate_impurity(ImpurityParams::scaled(0.05), 3, grid).unwrap();
    let s0 = embedded(grid, &gaussian(0.5, 0.3));
    let s1 = evolve(&s0, &w, 0.01, 100).unwrap();
    assert!((s1.norm_sqr() - s0.norm_sqr()).abs() < 1e-8);
    assert!((s1.time - 1.0).abs() < 1e-12);
}

#[test]
fn constant_potential_is_a_global_phase() {
    let grid = small_grid();
    let c = 0.03;
    let s0 = embedded(grid, &gaussian(0.3, 0.3));
    let free = evolve(&s0, &ImpurityField::zero(grid), 0.01, 50).unwrap();
    let shifted = evolve(&s0, &ImpurityField::constant(grid, c), 0.01, 50).unwrap();
    let phase = Complex64::from_polar(1.0, -c * 0.5);
    let mut rotated = free.clone();
    rotated.values.iter_mut().for_each(|v| *v *= phase);
    assert!(shifted.distance(&rotated) < 1e-10);
}

#[test]
fn free_evolution_tracks_band_phases() {
    let grid = SimGrid::new(280, 64, 14.0, 32.0).unwrap();
    let p = gaussian(0.5, 0.3);
    let s1 = evolve(&embedded(grid, &p), &ImpurityField::zero(grid), 0.005, 200).unwrap();
    let exact = embedded(grid, &evolve_free(&p, 1.0));
    assert!(s1.distance(&exact) < 1e-3, "{}", s1.distance(&exact));
}

#[test]
fn second_order_in_space_and_time() {
    let p = gaussian(0.5, 0.3);
    let y: Vec<f64> = [(70, 0.04), (140, 0.02), (280, 0.01)]
        .iter()
        .map(|&(nx, dt)| {
            let grid = SimGrid::new(nx, 64, 14.0, 32.0).unwrap();
            let s = evolve(
                &embedded(grid, &p),
                &ImpurityField::zero(grid),
                dt,
                (1.0f64 / dt).round() as usize,
            );
            s.unwrap().y_circular_mean()
        })
        .collect();
    let ratio = (y[0] - y[1]) / (y[1] - y[2]);
    assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
}

#[test]
fn commutator_ignores_the_potential() {
    let grid = small_grid();
    let s = embedded(grid, &gaussian(0.5, 0.3));
    let fft = RowFft::new(grid.ny);
    let v = commutator_expectation(&s, &fft);
    let p = gaussian(0.5, 0.3);
    assert!((v + p.drift_rate()).abs() < 1e-3);
    let w = generate_impurity(ImpurityParams::scaled(0.05), 9, grid).unwrap();
    let moved = evolve(&s, &w, 0.01, 10).unwrap();
    let h0 = Hamiltonian::new(grid, &ImpurityField::zero(grid)).unwrap();
    let hw = Hamiltonian::new(grid, &w).unwrap();
    let modes = moved.to_modes(&fft);
    assert_ne!(h0.energy_moments(&modes).0, hw.energy_moments(&modes).0);
    assert_eq!(
        commutator_expectation(&moved, &fft),
        velocity_from_modes(&grid, &modes) / moved.norm_sqr()
    );
}

#[test]
fn wide_filter_is_the_identity() {
    let grid = small_grid();
    let s = embedded(grid, &gaussian(0.5, 0.3));
    let (f, rep) = energy_filter(&s, &ImpurityField::zero(grid), 1.0, 1e4).unwrap();
    assert!(rep.retained > 1.0 - 1e-6);
    assert!(f.overlap(&s) > 1.0 - 1e-6);
}

#[test]
fn filter_keeps_a_packet_at_its_own_energy() {
    let grid = SimGrid::new(140, 256, 14.0, 128.0).unwrap();
    let p = gaussian(0.5, 0.05);
    let s = embedded(grid, &p);
    let zero = ImpurityField::zero(grid);
    let (e, var) = Hamiltonian::new(grid, &zero)
        .unwrap()
        .energy_moments(&s.to_modes(&RowFft::new(grid.ny)));
    assert!((e - p.energy()).abs() < 2e-3);
    for w in [0.1, 0.5] {
        let (_, rep) = energy_filter(&s, &zero, p.energy(), w).unwrap();
        let gaussian_profile = (1.0 + 2.0 * var / (w * w)).powf(-0.5);
        assert!(
            (rep.retained - gaussian_profile).abs() < 2e-3,
            "{w} {} {gaussian_profile} {var}",
            rep.retained
        );
        assert!(rep.energy_var <= w * w * 1.1);
    }
    let (_, rep) = energy_filter(&s, &zero, p.energy(), 0.5).unwrap();
    assert!(rep.retained >= 0.99, "{}", rep.retained);
    assert!(matches!(
        energy_filter(&s, &zero, 40.0, 0.05),
        Err(EdgeError::EmptyFilter(_))
    ));
}

#[test]
fn config_round_trip_and_errors() {
    let c = TransportConfig::parse("# run\nn = 0\namplitude = 0.5*delta_admissible\nT = 4\nseed=7\n").unwrap();
    assert_eq!(c.amplitude, Amplitude::Admissible(0.5));
    assert_eq!((c.t_final, c.seed), (4.0, 7));
    assert_eq!(TransportConfig::parse(&c.to_text()).unwrap(), c);
    assert_eq!(
        TransportConfig::parse("amplitude = 1e-7").unwrap().amplitude,
        Amplitude::Absolute(1e-7)
    );
    assert!(matches!(
        TransportConfig::parse("colour = red"),
        Err(EdgeError::Config(_))
    ));
    assert!(matches!(TransportConfig::parse("dt = fast"), Err(EdgeError::Config(_))));
    assert!(matches!(
        TransportConfig::parse("just words"),
        Err(EdgeError::Config(_))
    ));
}

fn quick_config() -> TransportConfig {
    TransportConfig {
        t_final: 2.0,
        dt: 0.01,
        grid_nx: 140,
        grid_ny: 128,
        record_every: 10,
        ..TransportConfig::default()
    }
}

#[test]
fn oversized_impurities_are_rejected_unless_allowed() {
    let mut c = quick_config();
    c.amplitude = Amplitude::Admissible(1.0);
    assert!(matches!(
        transport_experiment(&c, branches()),
        Err(EdgeError::Rejected(_))
    ));
    c.allow_violation = true;
    c.t_final = 0.2;
    assert!(transport_experiment(&c, branches()).is_ok());
}

#[test]
fn unperturbed_transport_drifts_within_the_window_bounds() {
    let mut c = quick_config();
    c.amplitude = Amplitude::Absolute(0.0);
    let r = transport_experiment(&c, branches()).unwrap();
    assert!(r.pass && r.seam_ok && r.ehrenfest_ok);
    let w = crate::mourre::nu_window(0.7, 1.3, branches()).unwrap();
    let s = &r.samples;
    let slope = (s[s.len() - 1].y_mean - s[0].y_mean) / (s[s.len() - 1].t - s[0].t);
    assert!(slope <= -w.nu_minus && slope >= -w.nu_plus, "{slope}");
    assert!(r
        .to_csv()
        .starts_with("t,y_mean,velocity_mean,energy_mean,energy_var,norm\n"));
}

#[test]
fn weak_impurities_keep_the_edge_current() {
    let r = transport_experiment(&quick_config(), branches()).unwrap();
    assert!(r.sup_norm <= r.amplitude);
    assert!(r.commutator_pass && r.monotone_pass, "{:?}", r.verdict());
}
