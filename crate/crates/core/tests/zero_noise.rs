use std::sync::Arc;

use ifdetect::bank::{Bank, BankConfig};
use ifdetect::detectability::IfParams;
use ifdetect::monitor::{extract_alarms, MovingChart};
use ifdetect::simkit::scenarios::{numerical_cov, NUMERICAL_DIRECTION, NUMERICAL_MEAN};
use ifdetect::simkit::{inject_faults, FaultEpisode, FaultSchedule};
use ifdetect::stat_core::GaussianModel;
use ifdetect::{Alarm, ChartConfig};

fn setup() -> (Arc<GaussianModel<f64>>, Vec<Vec<f64>>) {
    let model = Arc::new(GaussianModel::from_parts(NUMERICAL_MEAN.to_vec(), numerical_cov(), 5000).unwrap());
    let sched = FaultSchedule::new(vec![FaultEpisode {
        mu: 201,
        nu: 226,
        direction: NUMERICAL_DIRECTION.to_vec(),
        magnitude: 4.0,
    }])
    .unwrap();
    let stream = inject_faults(&vec![NUMERICAL_MEAN.to_vec(); 300], &sched).unwrap();
    (model, stream)
}

#[test]
fn centred_stream_alarms_halfway_through_the_worst_case_delay() {
    let (model, stream) = setup();
    let mut chart = MovingChart::new(model, ChartConfig::new(0.01, 7).unwrap()).unwrap();
    let flags: Vec<bool> = stream.iter().map(|x| chart.step(x).unwrap().is_some_and(|o| o.alarm)).collect();
    // four faulty samples of seven push the mean past δ_7; three do not
    assert_eq!(extract_alarms(&flags, 1).alarms(), &[Alarm::closed(204, 229)]);
}

#[test]
fn centred_stream_inference_contains_truth() {
    let (model, stream) = setup();
    let params = IfParams::uniform_lower_bounds(NUMERICAL_DIRECTION.to_vec(), 4.0, 10).unwrap();
    let rep = Bank::new(model, &params, BankConfig::default()).unwrap().run(&stream).unwrap();
    assert_eq!(rep.windows.iter().map(|w| w.window).collect::<Vec<_>>(), vec![7, 8, 9, 10]);
    let eps: Vec<_> = rep.confirmed().collect();
    assert_eq!(eps.len(), 1);
    assert!(eps[0].contains(201, 226), "{:?}", eps[0]);
    for w in &rep.windows {
        let a = w.raw_alarms.alarms()[0];
        assert!((201..=201 + w.mu_delay as i64).contains(&a.on));
        assert!((226..=226 + w.nu_delay as i64).contains(&a.off.unwrap()));
    }
}
