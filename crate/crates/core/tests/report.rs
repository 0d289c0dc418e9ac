use ndcg_phi::dataset::{self, evaluate_dataset, evaluate_single, EvaluationConfig};
use ndcg_phi::{Ranking, ScoredItem};
use proptest::prelude::*;
use serde_json::Value;

const TWO_DAYS: &str = "ranking_id,item_id,position,score
day1,N8,1,100
day1,N5,2,80
day1,N2,3,90
day1,N11,4,15
day1,N10,5,10
day2,N102,1,100
day2,N114,2,20
day2,N107,3,90
day2,N129,4,15
day2,N139,5,10
";

fn two_day_report(ks: Vec<usize>) -> dataset::EvaluationReport {
    let rankings = dataset::parse_rankings(TWO_DAYS.as_bytes()).unwrap();
    let cfg = EvaluationConfig {
        ks,
        ..EvaluationConfig::default()
    };
    evaluate_dataset(&rankings, &cfg).unwrap()
}

#[test]
fn day_two_difference_exceeds_day_one() {
    let report = two_day_report(vec![5]);
    let rows: Vec<_> = report.per_ranking.iter().collect();
    assert_eq!(rows[0].ranking_id, "day1");
    // every item is in the top-10 bucket, so ad-hoc sees no error on either day
    assert_eq!((rows[0].ndcg_adhoc, rows[1].ndcg_adhoc), (1.0, 1.0));
    assert!(rows[1].difference > rows[0].difference);
    assert!((rows[0].ndcg_phi - 0.969_593_142_510_020_3).abs() < 1e-12);
    assert!((rows[1].ndcg_phi - 0.935_631_856_400_698).abs() < 1e-12);
}

#[test]
fn json_report_layout() {
    let report = two_day_report(vec![5, 10, 15, 20]);
    let json: Value = serde_json::to_value(&report).unwrap();
    let obj = json.as_object().unwrap();
    let mut keys: Vec<_> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["config", "errors", "per_ranking", "summary"]);
    assert_eq!(obj["config"]["ks"], serde_json::json!([5, 10, 15, 20]));
    assert_eq!(
        obj["config"]["buckets"]["ranks"],
        serde_json::json!([10, 25, 50])
    );
    assert_eq!(obj["config"]["gain"], "exponential");
    assert_eq!(obj["per_ranking"].as_array().unwrap().len(), 8);
    assert_eq!(obj["summary"].as_array().unwrap().len(), 4);
    assert_eq!(obj["per_ranking"][0]["k_effective"], 5);

    for row in obj["per_ranking"].as_array().unwrap() {
        for key in ["ndcg_adhoc", "ndcg_phi", "difference"] {
            let text = row[key].to_string();
            let digits = text
                .chars()
                .filter(char::is_ascii_digit)
                .collect::<String>();
            assert!(digits.trim_start_matches('0').len() <= 15, "{key} = {text}");
        }
        let a = row["ndcg_adhoc"].as_f64().unwrap();
        let p = row["ndcg_phi"].as_f64().unwrap();
        let d = row["difference"].as_f64().unwrap();
        // each field carries at most 5e-16 rounding
        assert!((d - (a - p)).abs() <= 2e-15);
    }
}

#[test]
fn batch_equals_independent_evaluations() {
    let rankings = dataset::parse_rankings(TWO_DAYS.as_bytes()).unwrap();
    let cfg = EvaluationConfig {
        ks: vec![2, 5],
        ..EvaluationConfig::default()
    };
    let batch = evaluate_dataset(&rankings, &cfg).unwrap();
    let single: Vec<_> = rankings
        .iter()
        .flat_map(|r| evaluate_single(r, &cfg).unwrap())
        .collect();
    assert_eq!(batch.per_ranking, single);
    let reversed: Vec<Ranking> = rankings.iter().rev().cloned().collect();
    let rev = evaluate_dataset(&reversed, &cfg).unwrap();
    assert_eq!(rev.per_ranking[0], batch.per_ranking[2]);
}

#[test]
fn summary_matches_rows() {
    let report = two_day_report(vec![5]);
    let s = &report.summary[0];
    let diffs: Vec<f64> = report.per_ranking.iter().map(|r| r.difference).collect();
    let d = s.difference.as_ref().unwrap();
    assert_eq!(s.rankings, 2);
    assert_eq!(d.mean, (diffs[0] + diffs[1]) / 2.0);
    assert_eq!(d.min, diffs[0].min(diffs[1]));
    assert_eq!(d.max, diffs[0].max(diffs[1]));
    assert_eq!(d.median, diffs[0] + 0.5 * (diffs[1] - diffs[0]));
}

fn arb_rankings() -> impl Strategy<Value = Vec<Ranking>> {
    prop::collection::vec(
        prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1e9], 1..15),
        1..6,
    )
    .prop_map(|groups| {
        groups
            .into_iter()
            .enumerate()
            .map(|(g, scores)| {
                Ranking::from_ordered(
                    format!("rank {g}"),
                    scores
                        .into_iter()
                        .enumerate()
                        .map(|(i, s)| ScoredItem::new(format!("item,{i}"), s)),
                )
                .unwrap()
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn csv_round_trip(rankings in arb_rankings()) {
        let mut buf = Vec::new();
        dataset::write_rankings(&rankings, &mut buf).unwrap();
        let parsed = dataset::parse_rankings(buf.as_slice()).unwrap();
        prop_assert_eq!(parsed, rankings);
    }
}
