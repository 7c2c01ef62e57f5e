"""Command-line interface: ``askls {train,predict,eval,cv,graph-eval}``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines (keys are flag names without the leading dashes),
then command-line flags; later sources win.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical
failure (singular dual system), 5 data-validation error. Failures print one
``askls: error[<category>]: <message>`` line on stderr.
"""
import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .data import (CvGrid, cross_validate, load_csv, load_edge_list,
                   load_features, load_labels, split, standardize, write_cv_csv)
from .errors import AskLsError, ConfigError, DataError, NumericalError
from .kernels import (KernelFamily, KernelSpec, PrecomputedMatrix, adjacency_kernel,
                      load_matrix_csv, symmetrize)
from .multiclass import (EvalReport, evaluate, fit_classifier, format_table,
                         write_report_csv)
from .persist import load_model, save_model

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_DATA = 0, 2, 3, 4, 5

DEFAULTS = {
    "data": None, "labels": None, "label_col": "label", "kernel": "rbf",
    "sigma": "1.0", "a": "1.0", "gamma": "1.0", "model": "askls", "merge": "avg",
    "trials": 1, "seed": 0, "train_frac": 0.6, "folds": None, "standardize": "on",
    "out": None, "preprocess": "indegree", "metric": "accuracy", "model_file": None,
}
CHOICES = {
    "kernel": [f.value for f in KernelFamily], "model": ["askls", "lssvm"],
    "merge": ["avg", "source", "target"], "standardize": ["on", "off"],
    "preprocess": ["indegree", "none"], "metric": ["accuracy", "micro_f1", "macro_f1"],
}
INTS = ("trials", "seed", "folds")


@dataclass(frozen=True)
class RunConfig:
    command: str
    data: str = None
    labels: str = None
    label_col: str = "label"
    kernel: str = "rbf"
    sigma: tuple = (1.0,)
    a: tuple = (1.0,)
    gamma: tuple = (1.0,)
    model: str = "askls"
    merge: str = "avg"
    trials: int = 1
    seed: int = 0
    train_frac: float = 0.6
    folds: int = None
    standardize: bool = True
    out: str = None
    preprocess: str = "indegree"
    metric: str = "accuracy"
    model_file: str = None

    @property
    def family(self):
        return KernelFamily(self.kernel)

    @property
    def params(self):
        if self.family in (KernelFamily.RBF, KernelFamily.SNE):
            return self.sigma
        if self.family is KernelFamily.KL_EXP:
            return self.a
        return (None,)

    def grid(self, seed):
        return CvGrid(self.gamma, self.params, self.folds, seed)

    def needs_cv(self):
        return len(self.gamma) * len(self.params) > 1

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def _float_list(key, text):
    try:
        values = tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"--{key.replace('_', '-')}: expected comma-separated numbers, got {text!r}") from None
    if not values or any(not v > 0 for v in values):
        raise ConfigError(f"--{key.replace('_', '-')}: values must be positive")
    return values


def read_config_file(path):
    settings = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise OSError(f"cannot read config file {path}: {exc.strerror}") from None
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigError(f"{path}:{lineno}: unknown setting {key!r}")
            settings[key] = value
    return settings


def resolve_config(command, args):
    """Merge defaults < config file < explicit flags into a RunConfig."""
    settings = dict(DEFAULTS)
    if getattr(args, "config", None):
        settings.update(read_config_file(args.config))
    settings.update({k: v for k, v in vars(args).items()
                     if k in DEFAULTS and v is not None})
    for key, allowed in CHOICES.items():
        if str(settings[key]) not in allowed:
            raise ConfigError(f"--{key.replace('_', '-')} must be one of {allowed}, got {settings[key]!r}")
    try:
        for key in INTS:
            if settings[key] is not None:
                settings[key] = int(settings[key])
        settings["train_frac"] = float(settings["train_frac"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    for key in ("sigma", "a", "gamma"):
        settings[key] = _float_list(key, settings[key])
    settings["standardize"] = settings["standardize"] == "on"
    if command == "graph-eval":
        settings["kernel"] = "adjacency"
    cfg = RunConfig(command=command, **settings)
    validate(cfg)
    return cfg


def validate(cfg):
    if cfg.trials < 1:
        raise ConfigError(f"--trials must be at least 1, got {cfg.trials}")
    if cfg.folds is not None and cfg.folds < 2:
        raise ConfigError(f"--folds must be at least 2, got {cfg.folds}")
    if not 0 < cfg.train_frac < 1:
        raise ConfigError(f"--train-frac must be in (0, 1), got {cfg.train_frac}")
    needs = {"train": ["data"], "eval": ["data"], "cv": ["data"],
             "graph-eval": ["data", "labels"], "predict": ["model_file"]}[cfg.command]
    if cfg.command != "predict" and cfg.family not in (KernelFamily.RBF, KernelFamily.SNE, KernelFamily.T):
        needs = needs + ["labels"]
    if cfg.command == "predict" and cfg.data is None and cfg.labels is None:
        raise ConfigError("predict needs --data (feature CSV) or --labels (id file)")
    for key in needs:
        if getattr(cfg, key) is None:
            raise ConfigError(f"--{key.replace('_', '-')} is required for {cfg.command}")
    for key in ("data", "labels", "model_file"):
        path = getattr(cfg, key)
        if path is not None and not os.path.exists(path):
            raise FileNotFoundError(f"{path}: no such file")
    if cfg.command in ("train", "eval", "graph-eval") and cfg.needs_cv() and cfg.folds is None:
        raise ConfigError("several gamma/kernel values given; add --folds to select among them")


# --- shared pipeline pieces -------------------------------------------------

def load_problem(cfg):
    """Dataset plus kernel spec template for the configured kernel family."""
    fam = cfg.family
    if fam in (KernelFamily.RBF, KernelFamily.SNE, KernelFamily.T):
        ds = load_csv(cfg.data, cfg.label_col)
        spec = {KernelFamily.RBF: lambda: KernelSpec.rbf(cfg.sigma[0]),
                KernelFamily.SNE: lambda: KernelSpec.sne(cfg.sigma[0]),
                KernelFamily.T: KernelSpec.t}[fam]()
        return ds, spec
    source = os.path.abspath(cfg.data)
    if fam is KernelFamily.ADJACENCY:
        graph = load_edge_list(cfg.data)
        ds = load_labels(cfg.labels, id_type=int)
        return ds, KernelSpec.adjacency(graph, cfg.preprocess, source=source)
    matrix = load_matrix_csv(cfg.data)
    ds = load_labels(cfg.labels)
    if fam is KernelFamily.KL_EXP:
        return ds, KernelSpec.kl_exp(matrix, cfg.a[0], source=source)
    return ds, KernelSpec.precomputed(matrix, source=source)


def _select(cfg, train, spec, seed, method=None, fold_log=None):
    """Hyperparameters for one fit: CV over the grid when folds are set."""
    method = method or cfg.model
    if cfg.folds is None:
        return cfg.gamma[0], spec.with_param(cfg.params[0]), None
    result = cross_validate(train, cfg.grid(seed), spec, cfg.metric, method, cfg.merge)
    if fold_log is not None:
        fold_log.append(result)
    return result.best_gamma, spec.with_param(result.best_param), result


def _preprocess(cfg, train, test=None):
    if cfg.standardize and train.feature_dim > 0:
        return standardize(train, test)
    return train, test, None


def _trial_error(exc, trial):
    exc.args = (f"trial {trial}: {exc.args[0] if exc.args else exc}",) + tuple(exc.args[1:])
    return exc


def _method_name(method, family):
    return f"{'AsK-LS' if method == 'askls' else 'LS-SVM'}({family.value})"


# --- commands ---------------------------------------------------------------

def cmd_train(cfg, out=sys.stdout):
    ds, spec = load_problem(cfg)
    train, _, st = _preprocess(cfg, ds)
    gamma, spec, cv = _select(cfg, train, spec, cfg.seed)
    clf = fit_classifier(train.samples, train.labels, spec, gamma, cfg.model, cfg.merge)
    path = cfg.out or "model.json"
    save_model(path, clf, st, json.loads(cfg.to_json()))
    report = {
        "model_file": path, "method": cfg.model, "classes": list(clf.classes),
        "gamma": gamma, "kernel": spec.to_dict(),
        "residual": max(m.solution.residual for m in clf.models),
        "cv_score": None if cv is None else cv.best_score,
        "config": json.loads(cfg.to_json()),
    }
    out.write(json.dumps(report, sort_keys=True) + "\n")
    return report


def _read_ids(path):
    import csv
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file")
        rows = [r for r in reader if r and any(c.strip() for c in r)]
    ids = [r[0].strip() for r in rows]
    labels = None
    if len(header) > 1 and all(len(r) > 1 for r in rows):
        labels = np.array([int(float(r[1])) for r in rows])
    return ids, labels


def cmd_predict(cfg, out=sys.stdout):
    clf, st, _ = load_model(cfg.model_file)
    first = clf.models[0]
    if first.train.ndim == 2:
        ds, X = load_features(cfg.data, cfg.label_col)
        if st is not None:
            X = st.transform(X)
        ids = list(range(X.shape[0]))
        truth = None if ds is None else ds.labels
        pred = clf.predict(X)
    else:
        ids, truth = _read_ids(cfg.labels or cfg.data)
        if first.spec.family is KernelFamily.ADJACENCY:
            ids = [int(i) for i in ids]
        pred = clf.predict(np.array(ids))
    lines = ["id,prediction", *(f"{i},{p}" for i, p in zip(ids, pred.tolist()))]
    text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    if truth is not None:
        res = evaluate(pred, truth, clf.classes)
        sys.stderr.write(f"accuracy {res.accuracy:.6f} micro_f1 {res.micro_f1:.6f} "
                         f"macro_f1 {res.macro_f1:.6f}\n")
    return pred


def _write_reports(cfg, reports, out, cv_results=()):
    table = format_table(reports)
    header = f"# config {cfg.to_json()}\n"
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        write_report_csv(os.path.join(cfg.out, "report.csv"), reports)
        with open(os.path.join(cfg.out, "report.txt"), "w") as fh:
            fh.write(header + table)
        with open(os.path.join(cfg.out, "config.json"), "w") as fh:
            fh.write(cfg.to_json() + "\n")
        for i, res in enumerate(cv_results):
            write_cv_csv(os.path.join(cfg.out, f"cv_trial{i}.csv"), res)
    out.write(header + table)


def cmd_eval(cfg, out=sys.stdout):
    ds, spec = load_problem(cfg)
    report = EvalReport(_method_name(cfg.model, cfg.family))
    cv_results = []
    for t in range(cfg.trials):
        seed = cfg.seed + t
        try:
            train, test = split(ds, cfg.train_frac, seed)
            train, test, _ = _preprocess(cfg, train, test)
            gamma, tspec, _ = _select(cfg, train, spec, seed, fold_log=cv_results)
            clf = fit_classifier(train.samples, train.labels, tspec, gamma, cfg.model, cfg.merge)
            report.add(evaluate(clf.predict(test.samples), test.labels, ds.classes))
        except AskLsError as exc:
            raise _trial_error(exc, t)
    _write_reports(cfg, [report], out, cv_results)
    return report


def cmd_cv(cfg, out=sys.stdout):
    ds, spec = load_problem(cfg)
    train, _, _ = _preprocess(cfg, ds)
    folds = cfg.folds or 10
    result = cross_validate(train, CvGrid(cfg.gamma, cfg.params, folds, cfg.seed),
                            spec, cfg.metric, cfg.model, cfg.merge)
    if cfg.out:
        write_cv_csv(cfg.out, result)
    out.write(f"# config {cfg.to_json()}\n")
    for (gamma, param), score in sorted(result.cell_means().items(),
                                        key=lambda kv: (kv[0][0], kv[0][1] or 0.0)):
        out.write(f"gamma={gamma:g} param={'-' if param is None else f'{param:g}'} "
                  f"mean_{cfg.metric}={score:.6f}\n")
    out.write(f"best gamma={result.best_gamma:g} "
              f"param={'-' if result.best_param is None else f'{result.best_param:g}'} "
              f"score={result.best_score:.6f}\n")
    return result


def graph_problem(cfg):
    graph = load_edge_list(cfg.data)
    ds = load_labels(cfg.labels, id_type=int)
    source = os.path.abspath(cfg.data)
    asym = KernelSpec.adjacency(graph, cfg.preprocess, source=source)
    K = adjacency_kernel(graph, cfg.preprocess)
    sym = KernelSpec.precomputed(PrecomputedMatrix(K.row_ids, symmetrize(K).values))
    return ds, asym, sym


def cmd_graph_eval(cfg, out=sys.stdout):
    """AsK-LS on the directed adjacency vs LS-SVM on its average symmetrization."""
    ds, asym, sym = graph_problem(cfg)
    baseline = EvalReport("LS-SVM (A+A^T)/2")
    askls = EvalReport("AsK-LS A")
    cv_results = []
    for t in range(cfg.trials):
        seed = cfg.seed + t
        try:
            train, test = split(ds, cfg.train_frac, seed)
            for spec, method, report in ((sym, "lssvm", baseline), (asym, "askls", askls)):
                gamma, spec, _ = _select(cfg, train, spec, seed, method, cv_results)
                clf = fit_classifier(train.samples, train.labels, spec, gamma, method, cfg.merge)
                report.add(evaluate(clf.predict(test.samples), test.labels, ds.classes))
        except AskLsError as exc:
            raise _trial_error(exc, t)
    _write_reports(cfg, [baseline, askls], out, cv_results)
    return baseline, askls


COMMANDS = {"train": cmd_train, "predict": cmd_predict, "eval": cmd_eval,
            "cv": cmd_cv, "graph-eval": cmd_graph_eval}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    # every default is None so that unset flags fall through to the config file
    common.add_argument("--config", help="key = value settings file (flags override it)")
    common.add_argument("--data", help="feature CSV, precomputed matrix CSV, or edge list")
    common.add_argument("--labels", help="id,label CSV for matrix and graph kernels")
    common.add_argument("--label-col", dest="label_col", help="label column of a feature CSV (default: label)")
    common.add_argument("--kernel", help="rbf|sne|t|klexp|precomputed|adjacency (default: rbf)")
    common.add_argument("--sigma", help="RBF/SNE bandwidth; comma list for a CV grid (default: 1.0)")
    common.add_argument("--a", help="KL kernel scale; comma list for a CV grid (default: 1.0)")
    common.add_argument("--gamma", help="regularization; comma list for a CV grid (default: 1.0)")
    common.add_argument("--model", help="askls|lssvm (default: askls)")
    common.add_argument("--merge", help="avg|source|target (default: avg)")
    common.add_argument("--trials", help="repeated random splits (default: 1)")
    common.add_argument("--seed", help="base random seed (default: 0)")
    common.add_argument("--train-frac", dest="train_frac", help="training fraction (default: 0.6)")
    common.add_argument("--folds", help="k for stratified k-fold CV (default: no CV)")
    common.add_argument("--standardize", help="on|off, feature standardization (default: on)")
    common.add_argument("--preprocess", help="adjacency preprocessing indegree|none (default: indegree)")
    common.add_argument("--metric", help="CV metric accuracy|micro_f1|macro_f1 (default: accuracy)")
    common.add_argument("--out", help="output file (train, predict, cv) or directory (eval, graph-eval)")
    parser = argparse.ArgumentParser(
        prog="askls", description="Asymmetric-kernel LS-SVM classification.",
        epilog="Precedence: command-line flag > --config file > built-in default.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("train", parents=[common], help="fit and save a model")
    p = sub.add_parser("predict", parents=[common], help="predict with a saved model")
    p.add_argument("--model-file", dest="model_file", help="model written by 'train'")
    sub.add_parser("eval", parents=[common], help="repeated split/fit/score trials")
    sub.add_parser("cv", parents=[common], help="k-fold grid search")
    sub.add_parser("graph-eval", parents=[common],
                   help="directed adjacency: AsK-LS vs symmetrized LS-SVM")
    return parser


def _fail(category, message, code):
    sys.stderr.write(f"askls: error[{category}]: {message}\n")
    return code


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
        COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        return _fail("config", exc, EXIT_CONFIG)
    except NumericalError as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)
    except (DataError, AskLsError) as exc:
        return _fail("data", exc, EXIT_DATA)
    except OSError as exc:
        return _fail("io", exc, EXIT_IO)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
