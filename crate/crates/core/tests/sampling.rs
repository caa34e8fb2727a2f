//! Every sampler keeps its points inside the region it was asked for.

use pielm::cases::{case1, case2, case3, case4, CaseOptions};
use pielm::geometry::{Face, Geometry, Phase, Region, Sampling};

const N: usize = 1000;

fn check_interior(geometry: &Geometry<f64>, phase: Phase, sampling: Sampling) {
    let set = geometry.sample_phase_interior(phase, N, sampling).unwrap();
    assert_eq!(set.len(), N);
    for p in set.points() {
        assert!(geometry.domain().contains(p), "{p:?} outside the domain");
        assert!(geometry.classify(p).touches(phase), "{p:?} not in {phase}");
    }
}

fn geometries() -> Vec<(Geometry<f64>, bool)> {
    vec![
        (case1::<f64>(CaseOptions::default()).geometry, false),
        (case2::<f64>().geometry, true),
        (case3::<f64>().geometry, false),
        (case4::<f64>().geometry, true),
    ]
}

#[test]
fn interior_points_stay_in_their_phase() {
    for (g, two_phase) in geometries() {
        for sampling in [Sampling::random(3), Sampling::grid()] {
            check_interior(&g, Phase::One, sampling);
            if two_phase {
                check_interior(&g, Phase::Two, sampling);
            }
        }
    }
}

#[test]
fn interface_points_sit_on_the_front() {
    for (g, _) in geometries() {
        let set = g.sample_interface(N, Sampling::random(5)).unwrap();
        for p in set.points() {
            assert_eq!(g.classify(p), Region::Interface, "{p:?}");
        }
    }
}

#[test]
fn time_slices_have_constant_time() {
    for (g, _) in geometries() {
        for t_star in [0.0, 1.0] {
            let set = g
                .sample_time_slice(Phase::One, t_star, N, Sampling::random(9))
                .unwrap();
            for p in set.points() {
                assert_eq!(p[p.len() - 1], t_star);
                assert!(g.classify(p).touches(Phase::One));
            }
        }
    }
}

#[test]
fn face_points_lie_on_the_face() {
    let g = case4::<f64>().geometry;
    for (face, phase, axis, value) in [
        (Face::XLo, Phase::One, 0, 0.0),
        (Face::XHi, Phase::Two, 0, 2.0),
        (Face::YLo, Phase::One, 1, 0.0),
        (Face::YHi, Phase::Two, 1, 1.0),
    ] {
        let set = g
            .sample_fixed_boundary(face, phase, N, Sampling::random(2))
            .unwrap();
        for p in set.points() {
            assert_eq!(p[axis], value);
            assert!(g.classify(p).touches(phase), "{face} {p:?}");
        }
    }
    assert!(g
        .sample_fixed_boundary(Face::XLo, Phase::Two, 4, Sampling::grid())
        .is_err());
}

#[test]
fn streams_give_independent_draws() {
    let g = case2::<f64>().geometry;
    let a = g.sample_interface(10, Sampling::random(1)).unwrap();
    let b = g
        .sample_interface(10, Sampling::random(1).with_stream(2))
        .unwrap();
    let again = g.sample_interface(10, Sampling::random(1)).unwrap();
    assert_ne!(a.coords(), b.coords());
    assert_eq!(a.coords(), again.coords());
}
