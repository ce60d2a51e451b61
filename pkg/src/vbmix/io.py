"""Dataset and report serialization.

CSV datasets are UTF-8 with a header row naming the columns ``x1..xd``,
'.' as the decimal separator, and one observation per row.  Reports are
JSON with stable field names; floats rely on Python's shortest-round-trip
repr, which is lossless for doubles.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np
import scipy

from . import __version__
from . import family as fam
from .errors import DataError
from .evidence import EvidenceEstimate
from .cavi import FitResult
from .mixture import Dataset
from .selection import KRecord, SelectionReport

_FORMAT_VERSION = 1


def _versions() -> dict:
    return {"vbmix": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def load_dataset_csv(path, spec: fam.FamilySpec) -> Dataset:
    """Parse a dataset CSV against the family spec; errors name the line."""
    expected = [f"x{i + 1}" for i in range(spec.obs_dim)]
    try:
        handle = open(path, "r", encoding="utf-8", newline="")
    except OSError as err:
        raise DataError(f"cannot open {path}: {err}") from err
    rows = []
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file (no header)") from None
        header = [h.strip() for h in header]
        if header != expected:
            raise DataError(
                f"{path}: header {header!r} does not match expected {expected!r} "
                f"for a {spec.kind} family with {spec.obs_dim} column(s)"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != spec.obs_dim:
                raise DataError(
                    f"{path}: line {lineno}: expected {spec.obs_dim} fields, got {len(row)}"
                )
            values = []
            for name, cell in zip(expected, row):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}: line {lineno}: field {name!r} is not a number: {cell!r}"
                    ) from None
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: no observations")
    try:
        return Dataset(spec, np.asarray(rows, dtype=float))
    except ValueError as err:
        raise DataError(f"{path}: {err}") from err


def write_dataset_csv(data: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(f"x{i + 1}" for i in range(data.observations.shape[1])) + "\n")
        for row in data.observations:
            f.write(",".join(repr(float(v)) for v in row) + "\n")


# ---------------------------------------------------------------------------
# JSON reports


def _fit_payload(fit: FitResult) -> dict:
    return {
        "kind": "fit",
        "elbo": float(fit.elbo),
        "iterations": int(fit.iterations),
        "converged": bool(fit.converged),
        "init_tag": fit.init_tag,
        "weight_means": [float(v) for v in fit.weight_means],
        "component_means": [[float(v) for v in row] for row in fit.component_means],
        "elbo_trace": [float(v) for v in fit.state.elbo_trace],
    }


def _selection_payload(report: SelectionReport) -> dict:
    return {
        "kind": "selection",
        "k_hat": int(report.k_hat_elbo),
        "k_hat_bic": int(report.k_hat_bic),
        "n": int(report.n),
        "phi0": float(report.phi0),
        "seeds": {"master": int(report.seed)},
        "per_k": [
            {
                "k": int(r.k),
                "elbo": float(r.elbo),
                "bic": float(r.bic),
                "loglik": float(r.loglik),
                "init_tag": r.elbo_init_tag,
                "converged": bool(r.elbo_converged),
                "iterations": int(r.elbo_iterations),
            }
            for r in sorted(report.records, key=lambda r: r.k)
        ],
    }


def _evidence_payload(est: EvidenceEstimate) -> dict:
    return {
        "kind": "evidence",
        "log_evidence": float(est.log_evidence),
        "std_error": float(est.std_error),
        "ladder": [float(b) for b in est.ladder],
        "acceptance_rates": [float(a) for a in est.acceptance_rates],
    }


def write_report_json(report, path) -> None:
    """Serialize a SelectionReport, FitResult, or EvidenceEstimate."""
    if isinstance(report, SelectionReport):
        payload = _selection_payload(report)
    elif isinstance(report, FitResult):
        payload = _fit_payload(report)
    elif isinstance(report, EvidenceEstimate):
        payload = _evidence_payload(report)
    else:
        raise TypeError(f"cannot serialize {type(report).__name__}")
    payload["format"] = _FORMAT_VERSION
    payload["versions"] = _versions()
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
    except OSError as err:
        raise DataError(f"cannot write {path}: {err}") from err


def read_report_json(path):
    """Inverse of write_report_json (FitResult comes back without the big state)."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except OSError as err:
        raise DataError(f"cannot open {path}: {err}") from err
    kind = payload.get("kind")
    if kind == "selection":
        records = [
            KRecord(
                k=int(r["k"]),
                elbo=float(r["elbo"]),
                bic=float(r["bic"]),
                loglik=float(r["loglik"]),
                elbo_init_tag=r["init_tag"],
                elbo_converged=bool(r["converged"]),
                elbo_iterations=int(r["iterations"]),
            )
            for r in payload["per_k"]
        ]
        return SelectionReport(
            records=records,
            k_hat_elbo=int(payload["k_hat"]),
            k_hat_bic=int(payload["k_hat_bic"]),
            n=int(payload["n"]),
            phi0=float(payload["phi0"]),
            seed=int(payload["seeds"]["master"]),
        )
    if kind == "fit":
        from .cavi import VariationalState

        state = VariationalState(
            responsibilities=None,
            counts=None,
            dirichlet_alpha=None,
            component_posteriors=None,
            elbo_trace=[float(v) for v in payload["elbo_trace"]],
        )
        return FitResult(
            state=state,
            elbo=float(payload["elbo"]),
            iterations=int(payload["iterations"]),
            converged=bool(payload["converged"]),
            weight_means=np.array(payload["weight_means"]),
            component_means=np.array(payload["component_means"]),
            init_tag=payload["init_tag"],
        )
    if kind == "evidence":
        return EvidenceEstimate(
            log_evidence=float(payload["log_evidence"]),
            std_error=float(payload["std_error"]),
            ladder=np.array(payload["ladder"]),
            acceptance_rates=np.array(payload["acceptance_rates"]),
        )
    raise DataError(f"{path}: unknown report kind {kind!r}")


# ---------------------------------------------------------------------------
# results CSV (one row per experiment grid cell x K)

RESULTS_HEADER = ["cell_key", "k", "phi0", "n", "rep", "elbo", "bic", "w1", "redundant_mass"]


@dataclass
class ResultRow:
    cell_key: str
    k: int
    phi0: float
    n: int
    rep: int
    elbo: float = None
    bic: float = None
    w1: float = None
    redundant_mass: float = None


def write_results_csv(rows, path) -> None:
    """Deterministic results table: rows sorted by (cell_key, k, rep)."""

    def fmt(v):
        return "" if v is None else (repr(float(v)) if isinstance(v, float) else str(v))

    ordered = sorted(rows, key=lambda r: (r.cell_key, r.k, r.rep))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(RESULTS_HEADER) + "\n")
        for r in ordered:
            f.write(
                ",".join(
                    [
                        r.cell_key,
                        str(int(r.k)),
                        repr(float(r.phi0)),
                        str(int(r.n)),
                        str(int(r.rep)),
                        fmt(r.elbo),
                        fmt(r.bic),
                        fmt(r.w1),
                        fmt(r.redundant_mass),
                    ]
                )
                + "\n"
            )
