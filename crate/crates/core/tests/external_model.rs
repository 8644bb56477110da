use ndarray::{array, Array2};
use smx_core::models::{ExternalModel, ModelKind, SpectralModel};
use smx_core::SmxError;

fn launch(mode: &str, width: usize) -> smx_core::Result<ExternalModel> {
    let script = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/echo_model.py");
    ExternalModel::spawn(&["python3".into(), script.into(), mode.into(), width.to_string()])
}

#[test]
fn probabilistic_handshake_and_fixed_output() {
    let m = launch("fixed", 3).unwrap();
    assert_eq!(m.kind(), ModelKind::Probabilistic);
    assert_eq!(m.n_features(), 3);
    let p = m.predict_proba(array![[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]].view()).unwrap();
    assert_eq!(p, array![[0.7, 0.3], [0.7, 0.3]]);
    assert!(m.predict(array![[1.0, 2.0, 3.0]].view()).is_err());
    assert_eq!(m.predict_proba(Array2::zeros((0, 3)).view()).unwrap().nrows(), 0);
}

#[test]
fn continuous_outputs_round_trip() {
    let m = launch("sum", 2).unwrap();
    assert_eq!(m.kind(), ModelKind::Continuous);
    let y = m.predict(array![[1.0, 2.0], [-0.5, 0.25]].view()).unwrap();
    assert_eq!(y, vec![3.0, -0.25]);
}

#[test]
fn width_mismatch_is_caught_locally() {
    let m = launch("fixed", 3).unwrap();
    let err = m.predict_proba(array![[1.0, 2.0]].view()).unwrap_err();
    assert!(matches!(err, SmxError::Dimension { expected: 3, got: 2, .. }));
    assert!(m.predict_proba(array![[1.0, 2.0, 3.0]].view()).is_ok());
}

#[test]
fn error_reply_is_reported() {
    let m = launch("refuse", 1).unwrap();
    let err = m.predict_proba(array![[1.0]].view()).unwrap_err();
    assert!(err.to_string().contains("refusing to predict"), "{err}");
}

#[test]
fn malformed_reply_ends_session() {
    let m = launch("garbage", 1).unwrap();
    let err = m.predict_proba(array![[1.0]].view()).unwrap_err();
    assert!(err.to_string().contains("malformed"), "{err}");
    let again = m.predict_proba(array![[1.0]].view()).unwrap_err();
    assert!(again.to_string().contains("terminated"), "{again}");
}

#[test]
fn wrong_row_count_and_invalid_probabilities() {
    let m = launch("short", 1).unwrap();
    assert!(m.predict_proba(array![[1.0], [2.0]].view()).is_err());
    assert!(m.predict_proba(array![[1.0]].view()).unwrap_err().to_string().contains("terminated"));

    let m = launch("bad", 1).unwrap();
    let err = m.predict_proba(array![[1.0]].view()).unwrap_err();
    assert!(err.to_string().contains("[0,1]"), "{err}");
}

#[test]
fn missing_program_fails_to_launch() {
    let err = ExternalModel::spawn(&["/nonexistent/smx-model".into()]).unwrap_err();
    assert!(matches!(err, SmxError::Model(_)));
    assert!(ExternalModel::spawn(&[]).unwrap_err().is_config());
}
