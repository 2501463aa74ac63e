mod common;

use common::*;
use dea_frontier::dea;
use dea_frontier::improve::{improve_frontier, ImproveParams};
use dea_frontier::sections::{boundary_point, section_polyline, SectionKind, SectionPolyline, SectionSpec};
use dea_frontier::synth::{generate_synthetic, SynthSpec};

/// Slopes just left and right of `x` on the polyline.
fn slopes_at(p: &SectionPolyline, x: f64) -> (f64, f64) {
    let slopes = p.slopes();
    let k = p.vertices.windows(2).position(|w| w[0].0 <= x && x <= w[1].0).expect("x inside the polyline");
    let left = if (p.vertices[k].0 - x).abs() < 1e-12 && k > 0 { slopes[k - 1] } else { slopes[k] };
    let right = if (p.vertices[k + 1].0 - x).abs() < 1e-12 && k + 1 < slopes.len() { slopes[k + 1] } else { slopes[k] };
    (left, right)
}

#[test]
fn desk_isoquant_matches_grid_oracle() {
    let ds = d3();
    let spec = SectionSpec::through_unit(&ds, 1, SectionKind::S1, 0, 1);
    assert_eq!(boundary_point(&ds, &spec, 2.0).unwrap(), Some(2.0));
    assert!((boundary_point(&ds, &spec, 3.0).unwrap().unwrap() - 1.5).abs() < 1e-12);
    assert_eq!(boundary_point(&ds, &spec, 0.5).unwrap(), None);
    // Grid oracle: smallest x₂ with (x₁, x₂) in the set, scanned on a fine grid.
    for x1 in [1.25, 1.5, 2.5, 3.5, 5.0] {
        let lib = boundary_point(&ds, &spec, x1).unwrap().unwrap();
        let grid = (0..=8000)
            .map(|k| k as f64 / 1000.0)
            .find(|&x2| oracle_member(&ds, &[0, 1, 2], &spec.lift(x1, x2)))
            .unwrap();
        assert!((lib - grid).abs() <= 1e-3, "x1 = {x1}: {lib} vs {grid}");
    }
}

#[test]
fn desk_isoquant_has_infinite_and_zero_marginal_rates() {
    let ds = d3();
    let spec = SectionSpec::through_unit(&ds, 1, SectionKind::S1, 0, 1);
    let poly = section_polyline(&ds, &spec, 64).unwrap();
    assert_eq!(poly.vertices, [(1.0, 4.0), (2.0, 2.0), (4.0, 1.0)]);
    assert_eq!(poly.left_ray, Some((0.0, 1.0)));
    assert_eq!(poly.right_ray, Some((1.0, 0.0)));

    let res = improve_frontier(&ds, &ImproveParams::default()).unwrap();
    let after = section_polyline(&res.improved, &spec, 64).unwrap();
    assert!(after.left_ray.is_some() && after.right_ray.is_some());
    for x in [1.0, 2.0, 4.0] {
        let (l, r) = slopes_at(&after, x);
        for s in [l, r] {
            assert!(s.is_finite() && s < 0.0, "slope {s} at x1 = {x}");
        }
    }
}

#[test]
fn doubling_samples_leaves_vertices_in_place() {
    let ds = generate_synthetic(&SynthSpec::with_defaults(40, 3, 3, 3)).unwrap();
    let cases = [(SectionKind::S1, 0, 2), (SectionKind::S2, 0, 2), (SectionKind::S3, 2, 0), (SectionKind::S3, 0, 1)];
    for j in [0, 7, 19] {
        for (kind, a, b) in cases {
            let spec = SectionSpec::through_unit(&ds, j, kind, a, b);
            let coarse = section_polyline(&ds, &spec, 32).unwrap();
            let fine = section_polyline(&ds, &spec, 64).unwrap();
            assert!(coarse.has_expected_shape(1e-6) && fine.has_expected_shape(1e-6));
            let range = axis_ranges(&fine);
            assert!(max_vertex_shift(&coarse, &fine, range) <= 1e-5, "unit {j} {kind}");
            assert!(max_vertex_shift(&fine, &coarse, range) <= 1e-5, "unit {j} {kind}");
            for &(u, v) in &fine.vertices {
                assert!(dea::wpe_gap(&ds, &spec.lift(u, v)).unwrap() <= 1e-5);
            }
        }
    }
}

#[test]
fn section_text_carries_rays_and_annex() {
    let ds = d3();
    let spec = SectionSpec::through_unit(&ds, 1, SectionKind::S1, 0, 1);
    let mut poly = section_polyline(&ds, &spec, 16).unwrap();
    dea_frontier::sections::attach_annex(&ds, &spec, &mut poly);
    let text = poly.to_text();
    assert!(text.starts_with("# section kind=S1 base=D axes=x1,x2\n"));
    assert!(text.contains("1\t4\n2\t2\n4\t1\n# ray left\n# ray right\n"));
    let back = SectionPolyline::from_text(&text).unwrap();
    assert_eq!((&back.vertices, &back.annex, back.left_ray, back.right_ray), (&poly.vertices, &poly.annex, poly.left_ray, poly.right_ray));
}
