use super::*;

fn rendered(chart: Chart) -> Vec<String> {
    derive_chart_equations(chart).render()
}

#[test]
fn u11_equations() {
    let eqs = derive_chart_equations(Chart::U11);
    assert!(eqs.consistent);
    assert_eq!(rendered(Chart::U11), vec!["y = x*b", "b + x^2*b = 0"]);
}

#[test]
fn u21_equations() {
    let eqs = derive_chart_equations(Chart::U21);
    assert!(eqs.consistent);
    assert_eq!(
        rendered(Chart::U21),
        vec!["b = -x*d", "c = -y*d", "d + x^2*d + y^2*d = 0"]
    );
}

#[test]
fn u11_counts_over_f5() {
    let en = enumerate_chart(Chart::U11, 5, 1 << 20).unwrap();
    let c = en.counts;
    assert_eq!(
        (c.torsion, c.isotropy, c.intersection, c.total),
        (25, 50, 10, 65)
    );
    assert!(en.all_valid && en.shortcut_agrees);
}

#[test]
fn u11_over_f3_has_no_isotropy_component() {
    let c = enumerate_chart(Chart::U11, 3, 1 << 20).unwrap().counts;
    assert_eq!(
        (c.torsion, c.isotropy, c.intersection, c.total),
        (9, 0, 0, 9)
    );
}

#[test]
fn inclusion_exclusion_and_rapoport_locus() {
    for chart in [Chart::U11, Chart::U21] {
        for q in [3, 5, 7, 9] {
            let en = enumerate_chart(chart, q, 1 << 20).unwrap();
            let c = en.counts;
            assert_eq!(
                c.total,
                c.torsion + c.isotropy - c.intersection,
                "{chart} q={q}"
            );
            assert_eq!(c.rapoport, c.isotropy - c.intersection, "{chart} q={q}");
            assert!(en.all_valid && en.shortcut_agrees, "{chart} q={q}");
            for pt in &en.points {
                // the torsion component lies outside the Rapoport locus
                assert!(!(pt.torsion && pt.rapoport));
                assert_eq!(pt.rapoport, pt.isotropy && !pt.torsion);
            }
        }
    }
}

#[test]
fn torsion_component_is_a_coordinate_hyperplane() {
    // b = 0 on U11 and d = 0 on U21, all free otherwise
    assert_eq!(
        enumerate_chart(Chart::U11, 7, 1 << 20)
            .unwrap()
            .counts
            .torsion,
        49
    );
    assert_eq!(
        enumerate_chart(Chart::U21, 5, 1 << 20)
            .unwrap()
            .counts
            .torsion,
        125
    );
}

#[test]
fn isotropy_component_follows_the_conic() {
    // 1 + x² = 0 has two roots exactly when q ≡ 1 mod 4
    for (q, roots) in [(3u64, 0u64), (5, 2), (7, 0), (9, 2), (13, 2)] {
        let c = enumerate_chart(Chart::U11, q, 1 << 20).unwrap().counts;
        assert_eq!(c.isotropy, roots * q * q, "q={q}");
        assert_eq!(c.intersection, roots * q, "q={q}");
    }
}

#[test]
fn errors() {
    assert_eq!(
        enumerate_chart(Chart::U11, 4, 1 << 20).unwrap_err(),
        LocalModelError::EvenCharacteristic
    );
    assert_eq!(
        enumerate_chart(Chart::U11, 6, 1 << 20).unwrap_err(),
        LocalModelError::NotPrimePower(6)
    );
    assert!(matches!(
        enumerate_chart(Chart::U21, 7, 100),
        Err(LocalModelError::BudgetExceeded {
            needed: 2401,
            budget: 100
        })
    ));
}

#[test]
fn off_chart_coordinates_are_rejected() {
    let k = field_of_order(5).unwrap();
    let eqs = derive_chart_equations(Chart::U11);
    // b + x²b = 1 + 1 ≠ 0 at x = 1, b = 1
    assert!(ChartPoint::new(&k, &eqs, &[1, 0, 1]).is_none());
    let pt = ChartPoint::new(&k, &eqs, &[2, 3, 1]).unwrap();
    assert!(pt.is_valid(&k) && pt.on_isotropy_component(&k) && !pt.on_torsion_component(&k));
}

#[test]
fn degenerate_points_are_where_the_last_column_vanishes() {
    // b = a = 0 leaves q choices of x on U11; d = a = 0 leaves q² on U21
    for q in [3u64, 5, 7] {
        assert_eq!(
            enumerate_chart(Chart::U11, q, 1 << 20)
                .unwrap()
                .counts
                .degenerate,
            q
        );
        assert_eq!(
            enumerate_chart(Chart::U21, q, 1 << 20)
                .unwrap()
                .counts
                .degenerate,
            q * q
        );
    }
}

#[test]
fn counts_grow_with_q() {
    for chart in [Chart::U11, Chart::U21] {
        let at = |q: u64| enumerate_chart(chart, q, 1 << 20).unwrap().counts;
        let counts: Vec<ComponentCounts> = [3, 5, 7, 9, 11, 13].iter().map(|&q| at(q)).collect();
        for w in counts.windows(2) {
            assert!(w[0].torsion < w[1].torsion, "{chart}");
        }
        // whether 1 + x² splits depends on q mod 4, so totals are compared
        // within a residue class
        for w in counts.windows(3) {
            assert!(
                w[0].total < w[2].total && w[0].isotropy <= w[2].isotropy,
                "{chart}"
            );
        }
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn chart_points_satisfy_the_conditions(
            u21 in any::<bool>(),
            qi in 0usize..4,
            raw in proptest::collection::vec(0u32..1000, 4),
        ) {
            let q = [3u64, 5, 7, 9][qi];
            let chart = if u21 { Chart::U21 } else { Chart::U11 };
            let k = field_of_order(q).unwrap();
            let eqs = derive_chart_equations(chart);
            let coords: Vec<u32> = raw[..chart.coordinates().len()].iter().map(|r| r % q as u32).collect();
            let mut full = coords.clone();
            full.resize(chart.variables().len(), 0);
            let on_chart = eqs.equations.iter().all(|e| e.eval(&k, &full) == 0);
            match ChartPoint::new(&k, &eqs, &coords) {
                Some(pt) => {
                    prop_assert!(on_chart);
                    prop_assert!(pt.satisfies_conditions(&k));
                    prop_assert_eq!(rapoport_status(&k, &pt), rapoport_shortcut(&pt));
                }
                None => prop_assert!(!on_chart),
            }
        }
    }
}
