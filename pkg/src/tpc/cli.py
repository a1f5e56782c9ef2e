"""Command-line entry point: ``tpc {synth,fit,predict,eval,render}``.

Exit codes: 0 success, 1 runtime or data error, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .cohort import exclude_incomplete, load_cohort, split_train_test
from .community import read_partition, write_partition
from .errors import ArgumentError, TPCError, UsageError
from .pipeline import fit_model, profiles_for
from .prediction import prediction_accuracy
from .render import KINDS, render_population, render_prediction_trace, render_subtypes
from .similarity import load_weights
from .subtype import SubtypeModel
from .synthetic import adjusted_rand_index, generate_cohort, clinical_spec, read_labels, write_synthetic

log = logging.getLogger("tpc")

PREDICTION_HEADER = ["patient_id", "baseline_subtype", "baseline_distance", "subtype_at_t", "distance_at_t", "match"]


def default_seed():
    raw = os.environ.get("TPC_SEED", "0")
    try:
        value = int(raw)
    except ValueError:
        value = -1
    if value < 0:
        raise ArgumentError(f"TPC_SEED must be a non-negative integer, got {raw!r}")
    return value


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _seed(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seeds are non-negative integers")
    return value


def _weights_list(text):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from None


# -- subcommands ---------------------------------------------------------------


def cmd_synth(args):
    spec = clinical_spec(
        n=args.n, k=args.k, flip_noise=args.noise, seed=args.seed, genetics=args.genetics,
        weights=args.subtype_weights, n_incomplete=args.incomplete, jitter=args.jitter,
        assignment=args.assignment, min_separation=args.min_separation,
    )
    labeled = generate_cohort(spec)
    out = write_synthetic(labeled, args.out)
    print(f"wrote {labeled.cohort.n_patients} patients x {labeled.cohort.n_variables} variables x "
          f"{labeled.cohort.n_times} time points to {out}")
    return 0


def cmd_fit(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cohort = load_cohort(args.data, args.varspec)
    complete = exclude_incomplete(cohort)
    split = split_train_test(complete, args.test_fraction, args.seed, test_count=args.test_count)
    weights = None
    if args.weights:
        weights = load_weights(args.weights, split.train.variable_names, split.train.time_labels)
    result = fit_model(split.train, seed=args.seed, restarts=args.restarts,
                       min_community_size=args.min_community_size, weights=weights,
                       min_edge=args.min_edge)
    model = result.model
    model.save(out / "model.json")
    write_partition(out / "partition.csv", split.train.patient_ids, result.partition)
    with open(out / "split.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["patient_id", "set"])
        test_ids = set(split.test.patient_ids)
        for pid in complete.patient_ids:
            w.writerow([pid, "test" if pid in test_ids else "train"])
    if args.similarity_csv:
        result.network.to_csv(out / "similarity.csv")

    sizes_text = ", ".join(f"n={s}" for s in model.sizes())
    report = {
        "n_input": cohort.n_patients,
        "n_complete": complete.n_patients,
        "n_excluded": cohort.n_patients - complete.n_patients,
        "n_train": split.train.n_patients,
        "n_test": split.test.n_patients,
        "modularity": result.partition.modularity,
        "community_sizes": model.community_sizes,
        "retained_sizes": model.sizes(),
        "retained_subtypes": len(model.subtypes),
        "filtered_patients": model.filtered_patients,
        "sizes_text": sizes_text,
    }
    _write_json(out / "fit_report.json", report)
    print(f"patients: {cohort.n_patients} loaded, {complete.n_patients} complete, "
          f"{split.train.n_patients} train / {split.test.n_patients} test")
    print(f"communities: {len(model.community_sizes)} (Q = {result.partition.modularity:.4f}); "
          f"retained {len(model.subtypes)} subtypes: {sizes_text}; "
          f"filtered patients: {model.filtered_patients}")
    return 0


def cmd_predict(args):
    model = SubtypeModel.load(args.model)
    cohort = exclude_incomplete(load_cohort(args.data, args.varspec))
    if args.split:
        test_ids = []
        with open(args.split, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                if row.get("set") == "test":
                    test_ids.append(row["patient_id"])
        if not test_ids:
            raise ArgumentError(f"{args.split} lists no test patients")
        cohort = cohort.select(test_ids)
    profiles = profiles_for(model, cohort)
    m = len(model.time_labels)
    if m < 2:
        raise ArgumentError("prediction needs at least one time point after baseline")
    horizon = m - 1 if args.horizon is None else args.horizon
    if not 1 <= horizon < m:
        raise ArgumentError(f"--horizon must lie in 1..{m - 1}")

    reports = {t: prediction_accuracy(profiles, model, t, args.profile) for t in range(1, m)}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    final = reports[horizon]
    with open(out / "predictions.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PREDICTION_HEADER)
        for traj in final.trajectories:
            a0, at = traj[0], traj[horizon]
            w.writerow([a0.patient_id, a0.subtype_id, repr(a0.distance), at.subtype_id, repr(at.distance),
                        int(a0.subtype_id == at.subtype_id)])
    doc = {
        "horizon": model.time_labels[horizon],
        "horizon_index": horizon,
        "profile": args.profile,
        "time_labels": list(model.time_labels),
        "subtype_ids": [s.subtype_id for s in model.subtypes],
        "subtype_sizes": model.sizes(),
        "accuracy_by_time": {model.time_labels[t]: r.to_dict(model.time_labels) for t, r in reports.items()},
        "patients": [
            {
                "patient_id": traj[0].patient_id,
                "assignments": [
                    {"time": model.time_labels[a.time_index], "subtype": a.subtype_id,
                     "distance": a.distance, "distances": list(a.distances)}
                    for a in traj
                ],
            }
            for traj in final.trajectories
        ],
    }
    _write_json(out / "accuracy.json", doc)
    for t, r in reports.items():
        print(f"accuracy at {model.time_labels[t]}: {r.matched}/{r.total} = {r.accuracy:.3f}")
    return 0


def cmd_eval(args):
    partition = read_partition(args.partition)
    truth = read_labels(args.labels)
    ids = [p for p in partition if p in truth]
    if not ids:
        raise ArgumentError("partition and labels share no patients")
    comms = np.array([partition[p] for p in ids])
    sizes = np.bincount(comms)
    found = np.where(sizes[comms] >= args.min_community_size, comms, -1)
    ari = adjusted_rand_index([truth[p] for p in ids], found)
    doc = {"patients": len(ids), "ari": ari, "filtered_patients": int((found == -1).sum())}
    if args.out:
        _write_json(args.out, doc)
    print(f"ARI = {ari:.4f} over {len(ids)} patients ({doc['filtered_patients']} in filtered communities)")
    return 0


def cmd_render(args):
    if args.kind == "prediction-trace":
        if not args.predictions:
            raise ArgumentError("--predictions is required for the prediction-trace kind")
        with open(args.predictions, encoding="utf-8") as fh:
            svg = render_prediction_trace(json.load(fh))
    else:
        if not args.model:
            raise ArgumentError(f"--model is required for the {args.kind} kind")
        model = SubtypeModel.load(args.model)
        if args.kind == "subtypes":
            svg = render_subtypes(model, args.profile)
        else:
            svg = render_population(model)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    print(f"wrote {out}")
    return 0


# -- parser -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: error: {message}") from None


def build_parser():
    p = _Parser(prog="tpc", description="Trajectory profile clustering of longitudinal cohorts")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="generate a planted-subtype cohort")
    s.add_argument("--out", required=True)
    s.add_argument("--n", type=_positive_int, default=198)
    s.add_argument("--k", type=_positive_int, default=3)
    s.add_argument("--noise", type=float, default=0.05)
    s.add_argument("--seed", type=_seed)
    s.add_argument("--subtype-weights", type=_weights_list, help="comma-separated, default 22,72,61 for k=3")
    s.add_argument("--genetics", action="store_true", help="add 4 loci as genotype variables")
    s.add_argument("--incomplete", type=int, default=0, help="patients given one missing cell")
    s.add_argument("--jitter", type=float, default=0.4)
    s.add_argument("--assignment", choices=["multinomial", "quota"], default="multinomial")
    s.add_argument("--min-separation", type=float, default=0.4)
    s.set_defaults(func=cmd_synth)

    f = sub.add_parser("fit", help="cluster the training split into subtypes")
    f.add_argument("--data", required=True)
    f.add_argument("--varspec", required=True)
    f.add_argument("--out", required=True)
    f.add_argument("--seed", type=_seed)
    f.add_argument("--restarts", type=_positive_int, default=16)
    f.add_argument("--test-fraction", type=float, default=0.2)
    f.add_argument("--test-count", type=int)
    f.add_argument("--min-community-size", type=_positive_int, default=10)
    f.add_argument("--weights", help="CSV variable,time,weight")
    f.add_argument("--min-edge", type=float, help="zero similarity edges below this weight")
    f.add_argument("--similarity-csv", action="store_true", help="also dump the similarity matrix")
    f.set_defaults(func=cmd_fit)

    r = sub.add_parser("predict", help="assign held-out patients to subtypes")
    r.add_argument("--model", required=True)
    r.add_argument("--data", required=True)
    r.add_argument("--varspec", required=True)
    r.add_argument("--split", help="split.csv from fit; only rows with set=test are used")
    r.add_argument("--out", required=True)
    r.add_argument("--profile", choices=["raw", "normalized"], default="raw")
    r.add_argument("--horizon", type=int, help="time index for predictions.csv (default: last)")
    r.set_defaults(func=cmd_predict)

    e = sub.add_parser("eval", help="ARI between a partition and planted labels")
    e.add_argument("--partition", required=True)
    e.add_argument("--labels", required=True)
    e.add_argument("--min-community-size", type=_positive_int, default=10)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    d = sub.add_parser("render", help="write SVG figures")
    d.add_argument("--kind", required=True, choices=KINDS)
    d.add_argument("--model")
    d.add_argument("--predictions", help="accuracy.json from predict")
    d.add_argument("--profile", choices=["raw", "normalized"], default="raw")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_render)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code not in (0, None) and not isinstance(exc.code, int):
            print(exc.code, file=sys.stderr)
            return 2
        return exc.code or 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if getattr(args, "seed", "absent") is None:
            args.seed = default_seed()
        return args.func(args)
    except UsageError as exc:
        print(f"tpc {args.command}: {exc}", file=sys.stderr)
        return 2
    except (TPCError, OSError) as exc:
        print(f"tpc {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
