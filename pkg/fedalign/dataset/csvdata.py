import csv
import numpy as np
from ..error import InputError


def read_csv(fname):
    r"""Read a labeled dataset stored as CSV.

    The first row is the header ``f0,f1,...,f{d-1},label``; each following row holds the
    ``d`` feature values and the integer label of one sample.

    Parameters
    ----------
    fname: str
        name of the CSV file

    Returns
    -------
    features: 2D array of shape(n, d)

    labels: 1D array of int of shape(n,)
    """
    with open(fname, "r", newline="") as fin:
        reader = csv.reader(fin)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError('File "{}" is empty.'.format(fname))

        header = [h.strip() for h in header]
        d = len(header) - 1
        expected = ["f{}".format(j) for j in range(d)] + ["label"]
        if d < 1 or header != expected:
            raise InputError(
                'Corrupted header of file "{}"; expected "f0,...,f{{d-1}},label".'.format(
                    fname
                )
            )

        features = []
        labels = []
        for num_line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d + 1:
                raise InputError(
                    'Corrupted data at line {} of file "{}"; expected {} columns, '
                    "got {}.".format(num_line, fname, d + 1, len(row))
                )
            try:
                features.append([float(v) for v in row[:d]])
                labels.append(int(row[d]))
            except ValueError as e:
                raise InputError(
                    '{}.\nCorrupted data at line {} of file "{}".'.format(
                        e, num_line, fname
                    )
                )

    if len(labels) == 0:
        raise InputError('No data rows in file "{}".'.format(fname))

    return np.asarray(features, dtype=np.float64), np.asarray(labels, dtype=np.int64)


def write_csv(fname, features, labels):
    r"""Write features and labels to a CSV file readable by :meth:`read_csv`.

    Parameters
    ----------
    fname: str
        name of the written file

    features: 2D array of shape(n, d)

    labels: 1D array of int of shape(n,)
    """
    d = features.shape[1]
    with open(fname, "w", newline="") as fout:
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow(["f{}".format(j) for j in range(d)] + ["label"])
        for x, y in zip(features, labels):
            writer.writerow([repr(float(v)) for v in x] + [int(y)])
