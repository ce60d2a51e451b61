"""Preset experiment grids: simulation studies and the geyser case study.

Every preset expands into independent grid cells (each carrying
precomputed child seeds so execution order and parallelism cannot change
results), executes them, and writes three artifacts into the output
directory: ``results.csv`` (raw per-cell rows), ``summary.json``, and one
or more SVG plots.  Cells that fail are recorded under ``errors`` in the
summary instead of aborting the grid.
"""

import json
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from . import family as fam
from .cavi import DEFAULT_MAX_ITER, DEFAULT_TOL, ModelPriors, fit_best
from .evidence import ChainSettings, stepping_stone_evidence, theoretical_evidence_curve
from .io import ResultRow, write_results_csv
from .metrics import redundant_mass, wasserstein
from .mixture import (
    Dataset,
    MixtureParams,
    canonicalize,
    mixing_measure,
    sample,
    total_log_likelihood,
)
from .plotting import emit_svg_lines
from .presets import get_model
from .rng import child_rng
from .selection import bic, em_fit, select_k

EXPERIMENT_NAMES = (
    "figure1",
    "figure2",
    "figure3",
    "table1",
    "table2",
    "evidence_curve",
    "faithful",
    "preset1",
    "preset2",
    "preset3",
    "preset4",
    "preset5",
    "preset6",
)

_FIG1_N = (10_000, 100_000)
_FIG1_PHI0 = (1.0, 2.0, 3.5, 4.5, 6.0)
_FIG2_N = (10, 50, 250, 1250, 6250)
_FIG2_PHI0 = (1.0, 3.5, 6.0)
_FIG3_PHI0 = (1.0, 2.0, 3.0, 3.5, 4.0, 4.5, 5.0, 6.0)
_TABLE_N = (1_000, 10_000)
_TABLE_PHI0 = (1.0, 2.0, 3.5, 4.5, 6.0)
_FAITHFUL_FRACTIONS = (0.05, 0.075, 0.10, 0.15, 0.25)
_FAITHFUL_PHI0 = (1.0, 4.0)
_MODEL_N = (200, 400, 600, 800)


def old_faithful_array() -> np.ndarray:
    """The bundled 272 x 2 geyser dataset (eruption duration, waiting time)."""
    path = resources.files("vbmix").joinpath("data/old_faithful.csv")
    with path.open("r", encoding="utf-8") as f:
        rows = [line.split(",") for line in f.read().strip().splitlines()[1:]]
    return np.asarray(rows, dtype=float)


def _seed_int(master: int, tag: str, index: int = 0) -> int:
    return int(child_rng(master, tag, index).integers(2**63))


def _simulate(preset: str, n: int, data_seed: int) -> tuple:
    truth = get_model(preset)
    return truth, sample(truth, n, data_seed)


def _theta_bar(spec, fit) -> MixtureParams:
    return MixtureParams(spec, fit.weight_means, fit.component_means)


# ---------------------------------------------------------------------------
# cell runners (module level so process pools can pickle the tasks)


def _cell_fit(task):
    truth, data = _simulate(task["preset"], task["n"], task["data_seed"])
    priors = ModelPriors(truth.spec, task["phi0"])
    fit = fit_best(data, task["K"], priors, task["fit_seed"],
                   tol=task["tol"], max_iter=task["max_iter"])
    theta_bar = _theta_bar(truth.spec, fit)
    g_fit = canonicalize(mixing_measure(theta_bar))
    g_star = mixing_measure(truth)
    return {
        "elbo": fit.elbo,
        "weights_sorted": sorted((float(v) for v in fit.weight_means), reverse=True),
        "w1": wasserstein(g_fit, g_star, r=1),
        "redundant": redundant_mass(fit.weight_means, truth.k) if task["K"] >= truth.k else None,
        "loglik_mean": total_log_likelihood(theta_bar, data),
        "loglik_truth": total_log_likelihood(truth, data),
        "converged": fit.converged,
    }


def _cell_select(task):
    truth, data = _simulate(task["preset"], task["n"], task["data_seed"])
    report = select_k(data, task["kmax"], ModelPriors(truth.spec, task["phi0"]),
                      task["fit_seed"], tol=task["tol"], max_iter=task["max_iter"])
    out = {
        "k_hat_elbo": report.k_hat_elbo,
        "k_hat_bic": report.k_hat_bic,
        "per_k": [(r.k, r.elbo, r.bic) for r in report.records],
    }
    if task.get("phi0_alt") is not None:
        priors = ModelPriors(truth.spec, task["phi0_alt"])
        elbos = [
            fit_best(data, K, priors, _seed_int(task["fit_seed"], "alt", K),
                     tol=task["tol"], max_iter=task["max_iter"]).elbo
            for K in range(1, task["kmax"] + 1)
        ]
        out["k_hat_elbo_alt"] = 1 + int(np.argmax(elbos))
    return out


def _cell_faithful(task):
    raw = old_faithful_array()
    raw = raw.copy()
    raw[:, 1] /= 15.0
    spec = fam.gaussian_location(2, sigma2=0.25)
    n_sub = int(round(task["fraction"] * raw.shape[0]))
    if n_sub >= raw.shape[0]:
        X = raw
    else:
        idx = child_rng(task["subsample_seed"], "faithful.subsample").choice(
            raw.shape[0], size=n_sub, replace=False
        )
        X = raw[np.sort(idx)]
    data = Dataset(spec, X)
    report = select_k(data, task["kmax"], ModelPriors(spec, task["phi0"]),
                      task["fit_seed"], tol=task["tol"], max_iter=task["max_iter"])
    return {"k_hat_elbo": report.k_hat_elbo, "k_hat_bic": report.k_hat_bic, "n": data.n}


def _cell_evidence(task):
    truth, data = _simulate(task["preset"], task["n"], task["data_seed"])
    priors = ModelPriors(truth.spec, task["phi0"])
    out = {"loglik_truth": total_log_likelihood(truth, data)}
    K = task["K"]
    for phi0 in task["elbo_phi0"]:
        fit = fit_best(data, K, ModelPriors(truth.spec, phi0), task["fit_seed"],
                       tol=task["tol"], max_iter=task["max_iter"])
        out[f"elbo_phi{phi0:g}"] = fit.elbo
    em = em_fit(data, K, seed=task["fit_seed"], tol=task["tol"], max_iter=task["max_iter"])
    out["bic"] = bic(data, K, em)
    settings = ChainSettings(n_samples=task["samples"], burn_in=task["burn_in"],
                             seed=task["mh_seed"])
    est = stepping_stone_evidence(data, K, priors, settings, n_rungs=task["rungs"])
    out["evidence_mh"] = est.log_evidence
    out["evidence_se"] = est.std_error
    # the effective-dimension curve is defined for over-specified K only
    out["evidence_theory"] = (
        theoretical_evidence_curve(out["loglik_truth"], K, truth.k, data.n)
        if K >= truth.k
        else None
    )
    return out


_RUNNERS = {
    "fit": _cell_fit,
    "select": _cell_select,
    "faithful": _cell_faithful,
    "evidence": _cell_evidence,
}


def _execute(task):
    try:
        return task["cell_key"], _RUNNERS[task["kind"]](task), None
    except Exception as err:  # recorded per-cell, grid continues
        return task["cell_key"], None, f"{type(err).__name__}: {err}"


def _run_tasks(tasks, jobs: int):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_execute, tasks))
    else:
        raw = [_execute(t) for t in tasks]
    results, errors = {}, {}
    for key, payload, err in raw:
        if err is None:
            results[key] = payload
        else:
            errors[key] = err
    return results, errors


# ---------------------------------------------------------------------------
# experiment definitions


def _fit_task(seed, preset, n, phi0, K, rep, tol, max_iter, prefix):
    cell_key = f"{prefix}:n={n}:phi0={phi0:g}:k={K}:rep={rep}"
    return {
        "kind": "fit",
        "cell_key": cell_key,
        "preset": preset,
        "n": n,
        "phi0": phi0,
        "K": K,
        "rep": rep,
        "data_seed": _seed_int(seed, f"data:{preset}:n={n}", rep),
        "fit_seed": _seed_int(seed, f"fit:{cell_key}"),
        "tol": tol,
        "max_iter": max_iter,
    }


def _mean_std(values):
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std(ddof=1)) if arr.size > 1 else 0.0


def _ls_slope(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    return float(xc @ (y - y.mean()) / (xc @ xc))


def run_experiment(name, seed, out_dir, reps=None, jobs=1, n_override=None,
                   tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Run a named experiment grid; writes results.csv, summary.json, SVG plots."""
    canonical = str(name)
    if canonical.startswith("presets"):
        canonical = "preset" + canonical[len("presets"):]
    if canonical not in EXPERIMENT_NAMES:
        raise KeyError(f"unknown experiment {name!r}; available: {', '.join(EXPERIMENT_NAMES)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    builder = globals()[f"_build_{canonical}" if not canonical.startswith("preset")
                        else "_build_model_preset"]
    if canonical.startswith("preset"):
        tasks, summarize = builder(canonical, int(canonical[-1]), seed, reps, n_override,
                                   tol, max_iter)
    else:
        tasks, summarize = builder(seed, reps, n_override, tol, max_iter)
    results, errors = _run_tasks(tasks, max(int(jobs), 1))
    rows, summary = summarize(results, out)
    summary["experiment"] = canonical
    summary["seed"] = int(seed)
    summary["versions"] = {"vbmix": __version__}
    summary["errors"] = {k: errors[k] for k in sorted(errors)}
    write_results_csv(rows, out / "results.csv")
    with open(out / "summary.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    return out


def _build_figure1(seed, reps, n_override, tol, max_iter):
    ns = n_override or _FIG1_N
    tasks = [
        _fit_task(seed, "gauss6", n, phi0, K, 0, tol, max_iter, "figure1")
        for n in ns
        for phi0 in _FIG1_PHI0
        for K in range(1, 6)
    ]

    def summarize(results, out):
        rows, gaps = [], {}
        for t in tasks:
            r = results.get(t["cell_key"])
            if r is None:
                continue
            rows.append(ResultRow(t["cell_key"], t["K"], t["phi0"], t["n"], 0,
                                  elbo=r["elbo"], w1=r["w1"], redundant_mass=r["redundant"]))
            gaps.setdefault((t["n"], t["phi0"]), {})[t["K"]] = r["elbo"]
        summary = {"panels": []}
        for n in ns:
            series = {}
            for phi0 in _FIG1_PHI0:
                per_k = gaps.get((n, phi0), {})
                if 2 not in per_k:
                    continue
                ks = sorted(k for k in per_k if k >= 2)
                y = [(per_k[k] - per_k[2]) / np.log(n) for k in ks]
                series[f"phi0={phi0:g}"] = (ks, y)
                summary["panels"].append({
                    "n": n,
                    "phi0": phi0,
                    "k": ks,
                    "elbo_gap_per_logn": [float(v) for v in y],
                    "ls_slope": _ls_slope(ks, y),
                    "predicted_slope": -min(phi0, 3.5),
                })
            if series:
                emit_svg_lines(series, "number of components K",
                               "(ELBO_K - ELBO_2) / log n",
                               out / f"figure1_n{n}.svg",
                               title=f"ELBO gap per log n, n={n}")
        return rows, summary

    return tasks, summarize


def _build_figure2(seed, reps, n_override, tol, max_iter):
    ns = n_override or _FIG2_N
    tasks = [
        _fit_task(seed, "gauss6", n, phi0, K, 0, tol, max_iter, "figure2")
        for n in ns
        for phi0 in _FIG2_PHI0
        for K in range(1, 6)
    ]

    def summarize(results, out):
        rows, vals = [], {}
        for t in tasks:
            r = results.get(t["cell_key"])
            if r is None:
                continue
            rows.append(ResultRow(t["cell_key"], t["K"], t["phi0"], t["n"], 0, elbo=r["elbo"]))
            vals[(t["phi0"], t["K"], t["n"])] = (r["elbo"], r["loglik_mean"], r["loglik_truth"])
        summary = {"panels": []}
        for phi0 in _FIG2_PHI0:
            series = {}
            for K in range(1, 6):
                pts = [(np.log(n),) + vals[(phi0, K, n)] for n in ns if (phi0, K, n) in vals]
                if not pts:
                    continue
                xs = [p[0] for p in pts]
                ys = [p[1] - p[2] for p in pts]  # ELBO - loglik at variational mean
                series[f"K={K}"] = (xs, ys)
                summary["panels"].append({
                    "phi0": phi0, "K": K, "log_n": [float(v) for v in xs],
                    "elbo_minus_loglik_mean": [float(v) for v in ys],
                })
            if series:
                emit_svg_lines(series, "log n", "ELBO - loglik(theta_bar)",
                               out / f"figure2_phi{phi0:g}.svg",
                               title=f"ELBO deficit vs log n, phi0={phi0:g}")
        return rows, summary

    return tasks, summarize


def _build_figure3(seed, reps, n_override, tol, max_iter):
    n = (n_override or (10_000,))[0]
    tasks = [
        _fit_task(seed, "gauss6", n, phi0, K, 0, tol, max_iter, "figure3")
        for phi0 in _FIG3_PHI0
        for K in range(2, 6)
    ]

    def summarize(results, out):
        rows, vals = [], {}
        for t in tasks:
            r = results.get(t["cell_key"])
            if r is None:
                continue
            rows.append(ResultRow(t["cell_key"], t["K"], t["phi0"], t["n"], 0, elbo=r["elbo"]))
            vals[(t["phi0"], t["K"])] = r["elbo"]
        series, summary = {}, {"curves": []}
        for K in (3, 4, 5):
            xs = [p for p in _FIG3_PHI0 if (p, K) in vals and (p, 2) in vals]
            ys = [(vals[(p, K)] - vals[(p, 2)]) / np.log(n) for p in xs]
            if xs:
                series[f"K={K}"] = (xs, ys)
                summary["curves"].append({
                    "K": K, "phi0": [float(p) for p in xs],
                    "elbo_gap_per_logn": [float(v) for v in ys],
                    "predicted": [-min(p, 3.5) * (K - 2) for p in xs],
                })
        for K in (3, 4, 5):
            xs = list(_FIG3_PHI0)
            series[f"predicted K={K}"] = (xs, [-min(p, 3.5) * (K - 2) for p in xs])
        if series:
            emit_svg_lines(series, "phi0", "(ELBO_K - ELBO_2) / log n",
                           out / "figure3.svg",
                           title=f"ELBO gap per log n vs phi0, n={n}")
        return rows, summary

    return tasks, summarize


def _build_tables(prefix, seed, reps, n_override, tol, max_iter):
    reps = reps or 10
    ns = n_override or _TABLE_N
    tasks = [
        _fit_task(seed, "gauss6", n, phi0, 5, rep, tol, max_iter, prefix)
        for n in ns
        for phi0 in _TABLE_PHI0
        for rep in range(reps)
    ]
    return tasks, ns, reps


def _build_table1(seed, reps, n_override, tol, max_iter):
    tasks, ns, reps = _build_tables("table1", seed, reps, n_override, tol, max_iter)

    def summarize(results, out):
        rows, cells = [], {}
        for t in tasks:
            r = results.get(t["cell_key"])
            if r is None:
                continue
            rows.append(ResultRow(t["cell_key"], t["K"], t["phi0"], t["n"], t["rep"],
                                  elbo=r["elbo"], w1=r["w1"], redundant_mass=r["redundant"]))
            cells.setdefault((t["n"], t["phi0"]), []).append(r["weights_sorted"])
        summary = {"rows": [], "replicates": reps}
        for (n, phi0), wlists in sorted(cells.items()):
            arr = np.array(wlists)
            summary["rows"].append({
                "n": n, "phi0": phi0,
                "weight_mean": [float(v) for v in arr.mean(axis=0)],
                "weight_std": [float(v) for v in arr.std(axis=0, ddof=1)] if arr.shape[0] > 1
                               else [0.0] * arr.shape[1],
            })
        return rows, summary

    return tasks, summarize


def _build_table2(seed, reps, n_override, tol, max_iter):
    tasks, ns, reps = _build_tables("table2", seed, reps, n_override, tol, max_iter)

    def summarize(results, out):
        rows, cells = [], {}
        for t in tasks:
            r = results.get(t["cell_key"])
            if r is None:
                continue
            rows.append(ResultRow(t["cell_key"], t["K"], t["phi0"], t["n"], t["rep"],
                                  elbo=r["elbo"], w1=r["w1"], redundant_mass=r["redundant"]))
            cells.setdefault((t["n"], t["phi0"]), []).append(r["w1"])
        summary = {"rows": [], "replicates": reps}
        for (n, phi0), w1s in sorted(cells.items()):
            mean, std = _mean_std(w1s)
            summary["rows"].append({"n": n, "phi0": phi0, "w1_mean": mean, "w1_std": std})
        series = {}
        for n in sorted({c[0] for c in cells}):
            xs = sorted(p for (nn, p) in cells if nn == n)
            series[f"n={n}"] = (xs, [float(np.mean(cells[(n, p)])) for p in xs])
        if series:
            emit_svg_lines(series, "phi0", "mean W1(G(theta_bar), G*)",
                           out / "table2.svg", title="Transport error of the fitted mixing measure")
        return rows, summary

    return tasks, summarize


def _build_evidence_curve(seed, reps, n_override, tol, max_iter):
    n = (n_override or (1_000,))[0]
    tasks = []
    for K in range(1, 6):
        cell_key = f"evidence:n={n}:k={K}"
        tasks.append({
            "kind": "evidence",
            "cell_key": cell_key,
            "preset": "evidence1d",
            "n": n,
            "K": K,
            "phi0": 1.0,
            "elbo_phi0": (0.25, 1.0),
            "rungs": 30,
            "samples": 2000,
            "burn_in": 500,
            "data_seed": _seed_int(seed, f"data:evidence1d:n={n}", 0),
            "fit_seed": _seed_int(seed, f"fit:{cell_key}"),
            "mh_seed": _seed_int(seed, f"mh:{cell_key}"),
            "tol": tol,
            "max_iter": max_iter,
        })

    def summarize(results, out):
        rows, curve = [], {}
        for t in tasks:
            r = results.get(t["cell_key"])
            if r is None:
                continue
            rows.append(ResultRow(t["cell_key"], t["K"], t["phi0"], t["n"], 0,
                                  elbo=r["elbo_phi1"], bic=r["bic"]))
            curve[t["K"]] = r
        ks = sorted(curve)
        summary = {"n": n, "per_k": [
            {"k": k,
             "elbo_phi0.25": curve[k]["elbo_phi0.25"],
             "elbo_phi1": curve[k]["elbo_phi1"],
             "bic": curve[k]["bic"],
             "evidence_mh": curve[k]["evidence_mh"],
             "evidence_se": curve[k]["evidence_se"],
             "evidence_theory": curve[k]["evidence_theory"]}
            for k in ks
        ]}
        if ks:
            series = {
                "ELBO phi0=0.25": (ks, [curve[k]["elbo_phi0.25"] for k in ks]),
                "ELBO phi0=1": (ks, [curve[k]["elbo_phi1"] for k in ks]),
                "BIC": (ks, [curve[k]["bic"] for k in ks]),
                "evidence (MH)": (ks, [curve[k]["evidence_mh"] for k in ks]),
            }
            theory_ks = [k for k in ks if curve[k]["evidence_theory"] is not None]
            if theory_ks:
                series["evidence (theory)"] = (
                    theory_ks, [curve[k]["evidence_theory"] for k in theory_ks]
                )
            emit_svg_lines(series, "number of components K", "log evidence scale",
                           out / "evidence_curve.svg",
                           title=f"ELBO vs evidence, n={n}")
        return rows, summary

    return tasks, summarize


def _build_faithful(seed, reps, n_override, tol, max_iter):
    reps = reps or 100
    tasks = []
    for phi0 in _FAITHFUL_PHI0:
        for fraction in _FAITHFUL_FRACTIONS + (1.0,):
            n_reps = 1 if fraction >= 1.0 else reps
            for rep in range(n_reps):
                cell_key = f"faithful:frac={fraction:g}:phi0={phi0:g}:rep={rep}"
                tasks.append({
                    "kind": "faithful",
                    "cell_key": cell_key,
                    "fraction": fraction,
                    "phi0": phi0,
                    "rep": rep,
                    "kmax": 6,
                    "subsample_seed": _seed_int(seed, f"faithful.sub:frac={fraction:g}", rep),
                    "fit_seed": _seed_int(seed, f"fit:{cell_key}"),
                    "tol": tol,
                    "max_iter": max_iter,
                })

    def summarize(results, out):
        rows, cells = [], {}
        for t in tasks:
            r = results.get(t["cell_key"])
            if r is None:
                continue
            rows.append(ResultRow(t["cell_key"], r["k_hat_elbo"], t["phi0"], r["n"], t["rep"]))
            cells.setdefault((t["fraction"], t["phi0"]), []).append(
                (r["k_hat_elbo"], r["k_hat_bic"])
            )
        summary = {"replicates": reps, "rows": [], "full_data": []}
        for (fraction, phi0), pairs in sorted(cells.items()):
            arr = np.array(pairs, dtype=float)
            entry = {
                "fraction": fraction, "phi0": phi0,
                "mean_k_elbo": float(arr[:, 0].mean()),
                "mean_k_bic": float(arr[:, 1].mean()),
                "n_reps": int(arr.shape[0]),
            }
            if fraction >= 1.0:
                summary["full_data"].append(entry)
            else:
                summary["rows"].append(entry)
        series = {}
        fracs = [f for f in _FAITHFUL_FRACTIONS]
        for phi0 in _FAITHFUL_PHI0:
            ys = [e["mean_k_elbo"] for f in fracs for e in summary["rows"]
                  if e["fraction"] == f and e["phi0"] == phi0]
            if len(ys) == len(fracs):
                series[f"ELBO phi0={phi0:g}"] = (fracs, ys)
        ys_bic = [e["mean_k_bic"] for f in fracs for e in summary["rows"]
                  if e["fraction"] == f and e["phi0"] == _FAITHFUL_PHI0[0]]
        if len(ys_bic) == len(fracs):
            series["BIC"] = (fracs, ys_bic)
        if series:
            emit_svg_lines(series, "subsample fraction", "mean selected K",
                           out / "faithful.svg", title="Geyser data: selected K vs fraction")
        return rows, summary

    return tasks, summarize


def _build_model_preset(canonical, model_idx, seed, reps, n_override, tol, max_iter):
    reps = reps or 20
    ns = n_override or _MODEL_N
    model_name = f"model{model_idx}"
    k_star = get_model(model_name).k
    kmax = k_star + 2
    tasks = []
    for n in ns:
        for rep in range(reps):
            cell_key = f"{canonical}:n={n}:rep={rep}"
            tasks.append({
                "kind": "select",
                "cell_key": cell_key,
                "preset": model_name,
                "n": n,
                "rep": rep,
                "kmax": kmax,
                "phi0": 1.0,
                "phi0_alt": 5.0,
                "data_seed": _seed_int(seed, f"data:{model_name}:n={n}", rep),
                "fit_seed": _seed_int(seed, f"fit:{cell_key}"),
                "tol": tol,
                "max_iter": max_iter,
            })

    def summarize(results, out):
        rows, cells = [], {}
        for t in tasks:
            r = results.get(t["cell_key"])
            if r is None:
                continue
            for k, elbo_v, bic_v in r["per_k"]:
                rows.append(ResultRow(t["cell_key"], k, t["phi0"], t["n"], t["rep"],
                                      elbo=elbo_v, bic=bic_v))
            cells.setdefault(t["n"], []).append(
                (r["k_hat_elbo"], r["k_hat_elbo_alt"], r["k_hat_bic"])
            )
        summary = {"model": model_name, "k_star": k_star, "kmax": kmax,
                   "replicates": reps, "accuracy": []}
        for n in sorted(cells):
            arr = np.array(cells[n])
            summary["accuracy"].append({
                "n": n,
                "elbo_phi1": float(np.mean(arr[:, 0] == k_star)),
                "elbo_phi5": float(np.mean(arr[:, 1] == k_star)),
                "bic": float(np.mean(arr[:, 2] == k_star)),
                "n_reps": int(arr.shape[0]),
            })
        if summary["accuracy"]:
            xs = [e["n"] for e in summary["accuracy"]]
            series = {
                "ELBO phi0=1": (xs, [e["elbo_phi1"] for e in summary["accuracy"]]),
                "ELBO phi0=5": (xs, [e["elbo_phi5"] for e in summary["accuracy"]]),
                "BIC": (xs, [e["bic"] for e in summary["accuracy"]]),
            }
            emit_svg_lines(series, "sample size n", "selection accuracy",
                           out / f"{canonical}.svg",
                           title=f"{model_name}: fraction selecting K*={k_star}")
        return rows, summary

    return tasks, summarize
