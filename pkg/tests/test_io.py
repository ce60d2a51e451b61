import json
import math

import numpy as np
import pytest

from vbmix.cavi import ModelPriors, fit_best
from vbmix.errors import DataError
from vbmix.evidence import EvidenceEstimate
from vbmix.experiments import old_faithful_array
from vbmix.family import exponential_rate, gaussian_location, multinomial
from vbmix.io import (
    ResultRow,
    load_dataset_csv,
    read_report_json,
    write_dataset_csv,
    write_report_json,
    write_results_csv,
)
from vbmix.mixture import MixtureParams, sample
from vbmix.plotting import emit_svg_lines
from vbmix.selection import select_k


def _write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_old_faithful_asset():
    raw = old_faithful_array()
    assert raw.shape == (272, 2)
    assert raw[:, 0].min() == pytest.approx(1.6)
    assert raw[:, 1].sum() == pytest.approx(19284.0)


def test_load_old_faithful_through_csv_loader():
    from importlib import resources

    path = resources.files("vbmix").joinpath("data/old_faithful.csv")
    data = load_dataset_csv(str(path), gaussian_location(2))
    assert data.n == 272
    assert data.observations.shape == (272, 2)


def test_load_csv_roundtrip(tmp_path):
    theta = MixtureParams(gaussian_location(2), np.array([1.0]), np.array([[0.0, 1.0]]))
    data = sample(theta, 25, seed=1)
    path = tmp_path / "round.csv"
    write_dataset_csv(data, path)
    back = load_dataset_csv(path, data.spec)
    assert np.array_equal(back.observations, data.observations)


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(DataError):
        load_dataset_csv(tmp_path / "absent.csv", gaussian_location(1))


def test_load_csv_header_mismatch(tmp_path):
    p = _write(tmp_path, "a,b\n1,2\n")
    with pytest.raises(DataError, match="header"):
        load_dataset_csv(p, gaussian_location(2))
    p2 = _write(tmp_path, "x1,x2,x3\n1,2,3\n")
    with pytest.raises(DataError, match="header"):
        load_dataset_csv(p2, gaussian_location(2))


def test_load_csv_ragged_row_names_line(tmp_path):
    p = _write(tmp_path, "x1,x2\n1,2\n3,4,5\n")
    with pytest.raises(DataError, match="line 3"):
        load_dataset_csv(p, gaussian_location(2))


def test_load_csv_non_numeric_names_line_and_field(tmp_path):
    p = _write(tmp_path, "x1,x2\n1,2\n3,oops\n")
    with pytest.raises(DataError, match="line 3.*x2"):
        load_dataset_csv(p, gaussian_location(2))


def test_load_csv_empty_data(tmp_path):
    p = _write(tmp_path, "x1,x2\n")
    with pytest.raises(DataError, match="no observations"):
        load_dataset_csv(p, gaussian_location(2))


def test_load_csv_support_violations(tmp_path):
    p = _write(tmp_path, "x1\n-1.0\n")
    with pytest.raises(DataError):
        load_dataset_csv(p, exponential_rate())
    p2 = _write(tmp_path, "x1,x2\n1.5,0.5\n")
    with pytest.raises(DataError):
        load_dataset_csv(p2, multinomial(2, trials=2))


def _small_selection_report():
    theta = MixtureParams(gaussian_location(1), np.array([0.5, 0.5]), np.array([[-2.0], [2.0]]))
    data = sample(theta, 120, seed=2)
    return select_k(data, 3, ModelPriors(data.spec, 1.0), seed=5)


def test_selection_report_roundtrip(tmp_path):
    report = _small_selection_report()
    path = tmp_path / "sel.json"
    write_report_json(report, path)
    back = read_report_json(path)
    assert back.k_hat_elbo == report.k_hat_elbo
    assert back.k_hat_bic == report.k_hat_bic
    assert back.n == report.n and back.phi0 == report.phi0 and back.seed == report.seed
    for a, b in zip(back.records, report.records):
        assert (a.k, a.elbo, a.bic, a.loglik) == (b.k, b.elbo, b.bic, b.loglik)
    # write -> read -> write is byte-identical (lossless floats)
    path2 = tmp_path / "sel2.json"
    write_report_json(back, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_selection_json_fields_and_order(tmp_path):
    report = _small_selection_report()
    path = tmp_path / "sel.json"
    write_report_json(report, path)
    payload = json.loads(path.read_text())
    assert payload["kind"] == "selection"
    assert set(payload) >= {"k_hat", "per_k", "seeds", "versions"}
    ks = [row["k"] for row in payload["per_k"]]
    assert ks == sorted(ks)
    assert set(payload["per_k"][0]) >= {"k", "elbo", "bic", "loglik"}


def test_fit_report_roundtrip(tmp_path):
    theta = MixtureParams(gaussian_location(1), np.array([1.0]), np.array([[0.0]]))
    data = sample(theta, 60, seed=3)
    fit = fit_best(data, 2, ModelPriors(data.spec, 1.0), seed=1)
    path = tmp_path / "fit.json"
    write_report_json(fit, path)
    back = read_report_json(path)
    assert back.elbo == fit.elbo
    assert np.array_equal(back.weight_means, fit.weight_means)
    assert np.array_equal(back.component_means, fit.component_means)
    assert back.state.elbo_trace == fit.state.elbo_trace


def test_evidence_report_roundtrip(tmp_path):
    est = EvidenceEstimate(
        log_evidence=-123.4567890123456789,
        std_error=0.1,
        ladder=np.array([0.0, 0.125, 1.0]),
        acceptance_rates=np.array([0.5, 0.4, 0.3]),
    )
    path = tmp_path / "ev.json"
    write_report_json(est, path)
    back = read_report_json(path)
    assert back.log_evidence == est.log_evidence
    assert np.array_equal(back.ladder, est.ladder)


def test_float_round_trip_is_lossless(tmp_path):
    rng = np.random.default_rng(7)
    tricky = [0.1, 1e-308, 1e308, -1.0 / 3.0, math.pi] + list(rng.normal(size=20))
    est = EvidenceEstimate(
        log_evidence=tricky[0],
        std_error=tricky[1],
        ladder=np.array([0.0] + sorted(abs(t) % 1.0 for t in tricky[2:]) + [1.0]),
        acceptance_rates=np.array(tricky),
    )
    path = tmp_path / "f.json"
    write_report_json(est, path)
    back = read_report_json(path)
    assert back.acceptance_rates.tolist() == est.acceptance_rates.tolist()
    assert back.log_evidence == est.log_evidence


def test_results_csv_deterministic_and_sorted(tmp_path):
    rows = [
        ResultRow("b", 2, 1.0, 100, 0, elbo=-1.5),
        ResultRow("a", 1, 1.0, 100, 1, elbo=-2.5, w1=0.125),
        ResultRow("a", 1, 1.0, 100, 0, elbo=-2.0),
    ]
    p1, p2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    write_results_csv(rows, p1)
    write_results_csv(list(reversed(rows)), p2)
    assert p1.read_bytes() == p2.read_bytes()
    lines = p1.read_text().splitlines()
    assert lines[0] == "cell_key,k,phi0,n,rep,elbo,bic,w1,redundant_mass"
    assert lines[1].startswith("a,1,1.0,100,0")
    assert lines[3].startswith("b,2")


def test_svg_single_series_single_polyline(tmp_path):
    path = tmp_path / "p.svg"
    emit_svg_lines({"line": ([0.0, 1.0], [1.0, 2.0])}, "x", "y", path)
    text = path.read_text()
    assert text.count("<polyline") == 1
    assert "<svg" in text and "</svg>" in text


def test_svg_deterministic_bytes(tmp_path):
    series = {"a": ([0, 1, 2], [1.0, 0.5, 0.25]), "b": ([0, 1, 2], [0.1, 0.2, 0.3])}
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_svg_lines(series, "x", "y", p1, title="t")
    emit_svg_lines(series, "x", "y", p2, title="t")
    assert p1.read_bytes() == p2.read_bytes()


def test_svg_rejects_nonfinite(tmp_path):
    with pytest.raises(ValueError):
        emit_svg_lines({"bad": ([0.0, 1.0], [0.0, float("nan")])}, "x", "y", tmp_path / "x.svg")
    with pytest.raises(ValueError):
        emit_svg_lines({}, "x", "y", tmp_path / "y.svg")
