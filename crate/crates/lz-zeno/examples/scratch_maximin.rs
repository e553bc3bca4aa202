use lz_zeno::adiabatic::{classify_theorem2, maximin_evaluate, AngleSchedule, Theorem2Family};
use std::f64::consts::PI;

fn main() {
    for n in [3usize, 4] {
        let steps = 12;
        let levels = steps + 1;
        let mut stack = vec![0usize; n];
        let mut shown = 0;
        'outer: loop {
            let alphas: Vec<f64> = stack.iter().map(|&i| PI * i as f64 / steps as f64).collect();
            let mut sorted = alphas.clone();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let schedule = AngleSchedule::new(sorted.clone()).unwrap();
            let value = maximin_evaluate(&schedule).unwrap();
            let optimal = (value - 0.5).abs() <= 1e-9;
            let classified = classify_theorem2(&schedule, 1e-9) != Theorem2Family::NotOptimal;
            if optimal != classified && shown < 12 {
                println!(
                    "n={n} angles(deg)={:?} value={value:.12} classified={classified}",
                    sorted.iter().map(|a| (a * 180.0 / PI).round()).collect::<Vec<_>>()
                );
                shown += 1;
            }
            let mut k = n;
            loop {
                if k == 0 {
                    break 'outer;
                }
                k -= 1;
                if stack[k] + 1 < levels && (k == 0 || stack[k] + 1 <= stack[k - 1]) {
                    stack[k] += 1;
                    for j in k + 1..n {
                        stack[j] = 0;
                    }
                    break;
                }
            }
        }
    }
}
