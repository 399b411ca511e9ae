use curvem::mesh::EdgeTag;
use curvem::poly::{poly_dim, poly_dim_below};
use curvem::solver::{assemble, evaluate, solve, DofMap};
use curvem::verification::{
    compute_errors, run_case, CaseName, CurvedBoundary, GeometryMode, ManufacturedCase,
};
use curvem::vem::Discretization;

#[test]
fn velocity_dof_count_matches_the_space_dimension() {
    for name in CaseName::ALL {
        let case = name.build();
        let mesh = case.build_mesh(4).unwrap();
        for k in 0..=2 {
            let d = DofMap::new(&mesh, k);
            let free_edges = mesh.edges().iter().filter(|e| e.tag != EdgeTag::Essential).count();
            let cells = mesh.num_cells();
            assert_eq!(
                d.n_velocity(),
                free_edges * (k + 1) + (poly_dim(k) - 1) * cells + poly_dim_below(k) * cells
            );
        }
    }
}

#[test]
fn interior_edges_are_shared_with_opposite_signs() {
    let mesh = CaseName::DoubleInterface.build().build_mesh(6).unwrap();
    for (e, users) in mesh.edge_cells().iter().enumerate() {
        match mesh.edges()[e].tag {
            EdgeTag::Interior => {
                assert_eq!(users.len(), 2, "edge {e}");
                assert_eq!(users[0].1 + users[1].1, 0, "edge {e}");
            }
            _ => assert_eq!(users.len(), 1),
        }
    }
}

#[test]
fn curved_boundary_golden_errors() {
    // Recorded from the first run whose convergence rates were verified.
    let run = run_case(&CurvedBoundary::new(), 8, 2, GeometryMode::WithGeo).unwrap();
    assert_eq!(run.ndof(), 1328);
    assert!((run.errors.e_q / 2.343_245_966_494_126e-3 - 1.0).abs() < 1e-9);
    assert!((run.errors.e_p / 5.076_163_526_394_584e-4 - 1.0).abs() < 1e-9);
    assert!(run.residual <= 1e-10);
}

#[test]
fn nogeo_solves_on_chords() {
    let case = CaseName::CircleInclusion.build();
    let mesh = GeometryMode::NoGeo.apply(case.build_mesh(4).unwrap()).unwrap();
    assert!(mesh.is_straight());
    let disc = Discretization::new(1).unwrap();
    let sys = assemble(&mesh, case.as_ref(), &disc).unwrap();
    let sol = solve(&sys).unwrap();
    let fields = evaluate(&sys, &sol);
    let e = compute_errors(&mesh, &fields, case.as_ref(), 7).unwrap();
    assert!(e.e_q.is_finite() && e.e_p < 0.05);
}

#[test]
fn exact_fields_have_zero_error() {
    use curvem::solver::CellFields;
    let case = CurvedBoundary::new();
    let mesh = case.build_mesh(2).unwrap();
    let disc = Discretization::new(0).unwrap();
    let sys = assemble(&mesh, &case, &disc).unwrap();
    let sol = solve(&sys).unwrap();
    let mut fields: Vec<CellFields> = evaluate(&sys, &sol);
    // Zero velocity against a zero exact solution leaves only the pressure term.
    for f in &mut fields {
        f.velocity.iter_mut().for_each(|v| *v = 0.0);
        f.pressure.iter_mut().for_each(|v| *v = 0.0);
    }
    let zero = curvem::verification::PolynomialCase::new(0, vec![0.0], Default::default(), Default::default()).unwrap();
    let e = compute_errors(&mesh, &fields, &zero, 6).unwrap();
    assert_eq!((e.e_q, e.e_p), (0.0, 0.0));
}
