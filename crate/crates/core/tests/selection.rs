use std::sync::OnceLock;

use swseg::graph::{cut_at, partition_labelmap};
use swseg::scoring::{mumford_shah, MsConfig};
use swseg::select::{
    evaluate_tables, mean_std, oracle, select, train_model, CutGrid, CutValue, ScoreKind,
    ScoreTable, Search,
};
use swseg::stochastic::{apply_chain, HierarchySpec};
use swseg::synthetic::DiskScene;
use swseg::{ImageCase, PipelineOptions};

fn cases() -> &'static [ImageCase] {
    static CASES: OnceLock<Vec<ImageCase>> = OnceLock::new();
    CASES.get_or_init(|| {
        (0..6u64)
            .map(|i| {
                let scene = DiskScene::random(200 + i, 48, 48, 1).unwrap();
                let img = scene.render(i).unwrap();
                ImageCase::prepare(
                    format!("img{i}"),
                    img,
                    None,
                    None,
                    &PipelineOptions::default(),
                )
                .unwrap()
            })
            .collect()
    })
}

fn specs() -> Vec<HierarchySpec> {
    [
        "grad",
        "ssurf|grad",
        "svol|grad",
        "svol|ssurf|grad",
        "ssurf(erode=disk:2)|grad",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

/// Scores recomputed from scratch: each hierarchy built by its own chain
/// and each cut scored on pixels.
fn pixel_table(case: &ImageCase, specs: &[HierarchySpec], grid: &CutGrid) -> Vec<Vec<f64>> {
    specs
        .iter()
        .map(|spec| {
            let h = apply_chain(case.base(), spec).unwrap();
            grid.values()
                .map(|v| {
                    let p = v.cut(&h, spec.is_base()).unwrap();
                    let seg = partition_labelmap(&p, case.fine()).unwrap();
                    mumford_shah(case.image(), &seg, &MsConfig::default()).unwrap()
                })
                .collect()
        })
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn tables_match_pixel_recomputation() {
    let specs = specs();
    let grid = CutGrid::Threshold { levels: 8 };
    let score = ScoreKind::default();
    let search = Search::new(&specs, &grid, &score);
    let tables = search.tables(&cases()[..2]).unwrap();
    for (case, table) in cases().iter().zip(&tables) {
        let reference = pixel_table(case, &specs, &grid);
        for (s, row) in reference.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert!(close(table.get(s, c), v), "{} {s} {c}", case.id());
            }
        }
    }
}

#[test]
fn train_model_is_the_table_argmin() {
    let specs = specs();
    let grid = CutGrid::Threshold { levels: 8 };
    let score = ScoreKind::default();
    let train = &cases()[..3];
    let model = train_model(train, &specs, &grid, &score).unwrap();
    let reference: Vec<Vec<Vec<f64>>> = train
        .iter()
        .map(|c| pixel_table(c, &specs, &grid))
        .collect();
    let mut best = f64::INFINITY;
    for s in 0..specs.len() {
        for c in 0..grid.len() {
            best = best.min(reference.iter().map(|t| t[s][c]).sum());
        }
    }
    assert!(close(model.score, best));
    let at_model: f64 = reference
        .iter()
        .map(|t| t[model.spec_index][model.cut_index])
        .sum();
    assert!(close(at_model, best));
}

#[test]
fn single_image_model_is_its_oracle() {
    let specs = specs();
    let grid = CutGrid::Threshold { levels: 8 };
    let score = ScoreKind::default();
    let case = &cases()[0];
    let model = train_model(std::slice::from_ref(case), &specs, &grid, &score).unwrap();
    assert_eq!(model, oracle(case, &specs, &grid, &score).unwrap());
    let twice = vec![case.clone(), case.clone()];
    let doubled = train_model(&twice, &specs, &grid, &score).unwrap();
    assert_eq!(
        (doubled.spec_index, doubled.cut_index),
        (model.spec_index, model.cut_index)
    );
}

#[test]
fn oracle_never_loses_to_the_model() {
    let specs = specs();
    let grid = CutGrid::Threshold { levels: 8 };
    let score = ScoreKind::default();
    let search = Search::new(&specs, &grid, &score);
    let (train, test) = cases().split_at(3);
    let model = search.train_model(train).unwrap();
    let result = search.evaluate(test, &model).unwrap();
    assert_eq!(result.images.len(), 3);
    for im in &result.images {
        assert!(im.error() >= 0.0);
        assert!(im.oracle.score <= im.model_score);
    }
    let errors: Vec<f64> = result.images.iter().map(|i| i.error()).collect();
    let (m, s) = mean_std(&errors);
    assert_eq!((m, s), (result.mean_error, result.std_error));
}

#[test]
fn same_sets_and_single_choice_give_zero_error() {
    let specs = vec![HierarchySpec::base()];
    let grid = CutGrid::regions([3]).unwrap();
    let score = ScoreKind::default();
    let search = Search::new(&specs, &grid, &score);
    let set = &cases()[..3];
    let model = search.train_model(set).unwrap();
    let result = search.evaluate(set, &model).unwrap();
    assert!(result.images.iter().all(|i| i.error() == 0.0));
    assert_eq!((result.mean_error, result.std_error), (0.0, 0.0));
}

#[test]
fn more_specs_never_raise_the_oracle() {
    let all = specs();
    let grid = CutGrid::Threshold { levels: 8 };
    let score = ScoreKind::default();
    for case in &cases()[..2] {
        let mut previous = f64::INFINITY;
        for k in 1..=all.len() {
            let o = oracle(case, &all[..k], &grid, &score).unwrap();
            assert!(o.score <= previous);
            previous = o.score;
        }
    }
}

#[test]
fn union_training_lies_between_the_parts() {
    let specs = specs();
    let grid = CutGrid::Threshold { levels: 8 };
    let score = ScoreKind::default();
    let (a, b) = cases().split_at(3);
    let ma = train_model(a, &specs, &grid, &score).unwrap();
    let mb = train_model(b, &specs, &grid, &score).unwrap();
    let mu = train_model(cases(), &specs, &grid, &score).unwrap();
    let tol = 1e-9 * mu.score.abs();
    assert!(mu.score + tol >= ma.score + mb.score);
    let search = Search::new(&specs, &grid, &score);
    let tables = search.tables(cases()).unwrap();
    let at = |m: &swseg::select::Selection| -> f64 {
        tables
            .iter()
            .map(|t| t.get(m.spec_index, m.cut_index))
            .sum()
    };
    assert!(mu.score <= at(&ma).min(at(&mb)) + tol);
}

#[test]
fn ties_go_to_the_earlier_spec_then_smaller_cut() {
    let specs: Vec<HierarchySpec> = ["grad", "ssurf|grad"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let grid = CutGrid::Threshold { levels: 3 };
    let t = ScoreTable::from_rows("x", vec![vec![2.0, 1.0, 1.0], vec![1.0, 1.0, 3.0]]).unwrap();
    let sel = select(&[t], &specs, &grid).unwrap();
    assert_eq!((sel.spec_index, sel.cut_index), (0, 1));
    assert_eq!(sel.cut, CutValue::Threshold(0.5));
}

#[test]
fn csv_rows_match_the_tables() {
    let specs = specs();
    let grid = CutGrid::Threshold { levels: 8 };
    let score = ScoreKind::default();
    let search = Search::new(&specs, &grid, &score);
    let (train, test) = cases().split_at(3);
    let model = search.train_model(train).unwrap();
    let tables = search.tables(test).unwrap();
    let result = evaluate_tables(&tables, &model, &specs, &grid).unwrap();
    let csv = result.to_csv_string().unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), tables.len() + 2);
    for (row, table) in rows.iter().zip(&tables) {
        assert_eq!(&row[0], table.image_id());
        assert_eq!(&row[1], model.spec.canonical());
        let model_score: f64 = row[3].parse().unwrap();
        assert_eq!(model_score, table.get(model.spec_index, model.cut_index));
        let oracle_spec: HierarchySpec = row[4].parse().unwrap();
        let oracle_cut: CutValue = row[5].parse().unwrap();
        let s = specs.iter().position(|x| *x == oracle_spec).unwrap();
        let c = grid.values().position(|v| v == oracle_cut).unwrap();
        let oracle_score: f64 = row[6].parse().unwrap();
        assert_eq!(oracle_score, table.get(s, c));
        let min = (0..specs.len())
            .flat_map(|s| table.row(s).to_vec())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(oracle_score, min);
        let error: f64 = row[7].parse().unwrap();
        assert_eq!(error, model_score - oracle_score);
    }
    assert_eq!(&rows[tables.len()][0], "mean");
    assert_eq!(
        rows[tables.len()][7].parse::<f64>().unwrap(),
        result.mean_error
    );
    assert_eq!(&rows[tables.len() + 1][0], "std");
    assert_eq!(
        rows[tables.len() + 1][7].parse::<f64>().unwrap(),
        result.std_error
    );
}

#[test]
fn base_thresholds_are_normalized_per_image() {
    let case = &cases()[0];
    let h = case.base();
    let max = h.max_altitude();
    let p = CutValue::Threshold(0.5).cut(h, true).unwrap();
    assert_eq!(p, cut_at(h, 0.5 * max).unwrap());
    assert_eq!(CutValue::Threshold(1.0).cut(h, true).unwrap().n_regions, 1);
}

#[test]
fn failing_image_is_named() {
    let specs = vec![HierarchySpec::base()];
    let grid = CutGrid::Threshold { levels: 4 };
    let score = ScoreKind::Whdr { delta: 0.1 };
    let err = Search::new(&specs, &grid, &score)
        .tables(&cases()[..2])
        .unwrap_err();
    assert!(err.to_string().contains("img0"), "{err}");
}
