import csv
import logging
import numpy as np
from ..error import InputError

logger = logging.getLogger(__name__)

# configuration fields that may differ between compared summaries
_FREE_FIELDS = ("algorithms", "seeds", "output_dir", "name")

REPORT_COLUMNS = [
    "label",
    "n_runs",
    "accuracy_mean",
    "accuracy_std",
    "rounds_to_target_mean",
    "rounds_to_target_std",
    "n_reached",
    "delta_accuracy",
    "delta_rounds_to_target",
]


def _comparable(config):
    return {k: v for k, v in config.items() if k not in _FREE_FIELDS}


def _mean_std(values):
    if not values:
        return None, None
    return float(np.mean(values)), float(np.std(values))


def compare_report(summaries, baseline=None):
    r"""Compare algorithms across one or more experiment summaries.

    Rows are the algorithm labels in order of first appearance (prefixed with the summary
    index when several summaries are given). Each row holds the mean and (population)
    standard deviation over seeds of the final accuracy and of the rounds-to-target
    (over the seeds that reached the target), and their differences to the baseline row.

    Parameters
    ----------
    summaries: list of ExperimentSummary

    baseline: str (optional)
        Label of the baseline row; the first row if ``None``.

    Return
    ------
    (str, list of dict)
        The text table and its rows.
    """
    if not summaries:
        raise InputError("No summary to compare.")
    reference = _comparable(summaries[0].config)
    for i, s in enumerate(summaries[1:], start=1):
        if _comparable(s.config) != reference:
            msg = "Summary {} was produced with a different configuration than summary 0.".format(i)
            logger.error(msg)
            raise InputError(msg)

    groups = {}
    order = []
    for i, s in enumerate(summaries):
        for rec in s.records:
            label = rec["label"] if len(summaries) == 1 else "{}:{}".format(i, rec["label"])
            if label not in groups:
                groups[label] = []
                order.append(label)
            groups[label].append(rec)

    if len(order) < 2:
        msg = "At least 2 algorithms are needed for a comparison, got {}.".format(len(order))
        logger.error(msg)
        raise InputError(msg)
    if baseline is None:
        baseline = order[0]
    elif baseline not in groups:
        raise InputError(
            'Unknown baseline "{}"; rows are: {}.'.format(baseline, ", ".join(order))
        )

    rows = []
    for label in order:
        recs = groups[label]
        acc_mean, acc_std = _mean_std([r["final_accuracy"] for r in recs])
        reached = [r["rounds_to_target"] for r in recs if r["rounds_to_target"] is not None]
        rtt_mean, rtt_std = _mean_std(reached)
        rows.append(
            {
                "label": label,
                "n_runs": len(recs),
                "accuracy_mean": acc_mean,
                "accuracy_std": acc_std,
                "rounds_to_target_mean": rtt_mean,
                "rounds_to_target_std": rtt_std,
                "n_reached": len(reached),
            }
        )

    base = rows[order.index(baseline)]
    for row in rows:
        row["delta_accuracy"] = row["accuracy_mean"] - base["accuracy_mean"]
        if row["rounds_to_target_mean"] is None or base["rounds_to_target_mean"] is None:
            row["delta_rounds_to_target"] = None
        else:
            row["delta_rounds_to_target"] = (
                row["rounds_to_target_mean"] - base["rounds_to_target_mean"]
            )

    return format_table(rows, baseline), rows


def _fmt(x, spec):
    return "-" if x is None else format(x, spec)


def format_table(rows, baseline):
    width = max(len("algorithm"), max(len(r["label"]) for r in rows))
    s = "{:<{w}}  {:>17}  {:>17}  {:>7}  {:>9}  {:>9}\n".format(
        "algorithm", "accuracy", "rounds-to-target", "reached", "d_acc", "d_rounds", w=width
    )
    s += "-" * len(s.rstrip("\n")) + "\n"
    for r in rows:
        acc = "{} +- {}".format(_fmt(r["accuracy_mean"], ".4f"), _fmt(r["accuracy_std"], ".4f"))
        rtt = "{} +- {}".format(
            _fmt(r["rounds_to_target_mean"], ".1f"), _fmt(r["rounds_to_target_std"], ".1f")
        )
        s += "{:<{w}}  {:>17}  {:>17}  {:>7}  {:>9}  {:>9}\n".format(
            r["label"],
            acc,
            rtt,
            "{}/{}".format(r["n_reached"], r["n_runs"]),
            _fmt(r["delta_accuracy"], "+.4f"),
            _fmt(r["delta_rounds_to_target"], "+.1f"),
            w=width,
        )
    s += "Differences are relative to {}.\n".format(baseline)
    return s


def write_report_csv(path, rows):
    with open(path, "w", newline="") as fout:
        writer = csv.DictWriter(fout, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: ("" if r[k] is None else r[k]) for k in REPORT_COLUMNS})
