import os
import logging
import numpy as np
from .csvdata import read_csv, write_csv
from ..log import log_entry

logger = logging.getLogger(__name__)


implemented_format = dict()
implemented_format["csv"] = ".csv"


class LabeledDataset:
    r"""Feature matrix and integer class labels held by one client.

    The arrays are copied and made read-only at construction.

    Parameters
    ----------
    features: 2D array, shape(n, d)
        One sample per row. All entries must be finite.

    labels: 1D array of int, shape(n,)
        Class labels in ``[0, num_classes)``.

    num_classes: int (optional)
        Number of classes ``C``. If ``None``, ``max(labels) + 1`` is used.
    """

    def __init__(self, features, labels, num_classes=None):
        features = np.array(features, dtype=np.float64)
        labels = np.array(labels)

        if features.ndim != 2:
            report_error("Features should be a 2D array, got {}D.".format(features.ndim))
        if labels.ndim != 1:
            report_error("Labels should be a 1D array, got {}D.".format(labels.ndim))
        n = features.shape[0]
        if n < 1:
            report_error("A dataset needs at least one sample.")
        if labels.shape[0] != n:
            report_error(
                "Number of labels ({}) differs from number of feature rows ({}).".format(
                    labels.shape[0], n
                )
            )
        if labels.dtype.kind not in "iu":
            if not np.all(np.mod(labels, 1) == 0):
                report_error("Labels should be integers.")
        labels = labels.astype(np.int64)
        if not np.all(np.isfinite(features)):
            report_error("Features contain NaN or Inf.")
        if num_classes is None:
            num_classes = int(labels.max()) + 1
        if np.any(labels < 0) or np.any(labels >= num_classes):
            report_error(
                "Labels should be in [0, {}), got range [{}, {}].".format(
                    num_classes, labels.min(), labels.max()
                )
            )

        features.setflags(write=False)
        labels.setflags(write=False)
        self.features = features
        self.labels = labels
        self.num_classes = int(num_classes)

    def __len__(self):
        return self.features.shape[0]

    def get_num_samples(self):
        return self.features.shape[0]

    def get_num_features(self):
        return self.features.shape[1]

    def get_num_classes(self):
        return self.num_classes

    def subset(self, indices):
        r"""Return the dataset formed by rows ``indices`` (in that order)."""
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            self.features[indices], self.labels[indices], self.num_classes
        )

    def replace(self, features=None, labels=None):
        r"""Return a new dataset with the features and/or labels swapped out."""
        return LabeledDataset(
            self.features if features is None else features,
            self.labels if labels is None else labels,
            self.num_classes,
        )

    def sort_by_label(self):
        r"""Return a copy ordered by label; ties keep their original order."""
        order = np.argsort(self.labels, kind="stable")
        return self.subset(order)

    def same_as(self, other):
        r"""Whether ``other`` holds bit-identical features, labels and class count."""
        return (
            self.num_classes == other.num_classes
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
        )


def concatenate(datasets):
    r"""Stack several datasets with the same feature dimension and class count."""
    if len(datasets) == 0:
        report_error("Nothing to concatenate.")
    num_classes = datasets[0].num_classes
    for ds in datasets:
        if ds.num_classes != num_classes:
            report_error("Cannot concatenate datasets with different class counts.")
    features = np.concatenate([ds.features for ds in datasets])
    labels = np.concatenate([ds.labels for ds in datasets])
    return LabeledDataset(features, labels, num_classes)


def read_dataset(path, fmt="csv", num_classes=None):
    r"""Read a labeled dataset stored in a file.

    Parameters
    ----------
    path: str
        Path to the file.

    fmt: str
        Format of the file. Currently, only `csv` is supported: a header row
        ``f0,...,f{d-1},label`` followed by one sample per line.

    num_classes: int (optional)
        Number of classes. If ``None``, inferred from the largest label.
    """
    if fmt not in implemented_format:
        report_error('Data file format "{}" not recognized.'.format(fmt))

    if fmt == "csv":
        features, labels = read_csv(path)

    ds = LabeledDataset(features, labels, num_classes)
    msg = '{} samples with {} features read from "{}".'.format(
        ds.get_num_samples(), ds.get_num_features(), path
    )
    log_entry(logger, msg, level="info")
    return ds


def write_dataset(path, dataset, fmt="csv"):
    r"""Write a labeled dataset to a file in the specified format."""
    if fmt not in implemented_format:
        report_error('Data file format "{}" not recognized.'.format(fmt))

    dirname = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(dirname):
        os.makedirs(dirname)

    if fmt == "csv":
        write_csv(path, dataset.features, dataset.labels)


class DatasetError(Exception):
    def __init__(self, msg):
        super(DatasetError, self).__init__(msg)
        self.msg = msg

    def __str__(self):
        return self.msg


def report_error(msg):
    logger.error(msg)
    raise DatasetError(msg)
