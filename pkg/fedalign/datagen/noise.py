import logging
import numpy as np
from ..error import InputError
from ..utils import make_rng

logger = logging.getLogger(__name__)

# sub-stream tag of the experiment seed
NOISE_STREAM = 3


class NoiseProfile:
    r"""Severity of the noise injected into non-priority clients.

    The non-priority clients are ordered; client ``i`` of ``M`` receives a label-flip
    probability and an irrelevant-data fraction given by :func:`noise_level_for_client`.
    A high skew puts most clients close to the maximum level.

    Parameters
    ----------
    label_noise_factor: float
        Maximum label-flip level (>= 0); clamped to 1 when used as a probability.

    label_noise_skew: float
        Skew of the label-flip levels towards the maximum (> 0).

    random_data_fraction_factor: float
        Maximum fraction of rows replaced by irrelevant data, in [0, 1].

    random_data_fraction_skew: float
        Skew of the irrelevant-data fractions towards the maximum (> 0).
    """

    def __init__(
        self,
        label_noise_factor=0.0,
        label_noise_skew=1.0,
        random_data_fraction_factor=0.0,
        random_data_fraction_skew=1.0,
    ):
        errors = []
        if label_noise_factor < 0:
            errors.append(
                "label_noise_factor should be >= 0, got {}.".format(label_noise_factor)
            )
        if label_noise_skew <= 0:
            errors.append(
                "label_noise_skew should be > 0, got {}.".format(label_noise_skew)
            )
        if not 0 <= random_data_fraction_factor <= 1:
            errors.append(
                "random_data_fraction_factor should be in [0, 1], got {}.".format(
                    random_data_fraction_factor
                )
            )
        if random_data_fraction_skew <= 0:
            errors.append(
                "random_data_fraction_skew should be > 0, got {}.".format(
                    random_data_fraction_skew
                )
            )
        if errors:
            msg = " ".join(errors)
            logger.error(msg)
            raise InputError(msg)

        self.label_noise_factor = float(label_noise_factor)
        self.label_noise_skew = float(label_noise_skew)
        self.random_data_fraction_factor = float(random_data_fraction_factor)
        self.random_data_fraction_skew = float(random_data_fraction_skew)

    def levels(self, n_nonpriority):
        r"""Per-client ``(flip_probs, irrelevant_fractions)``, each clamped to [0, 1]."""
        flips = [
            min(
                noise_level_for_client(
                    i, n_nonpriority, self.label_noise_factor, self.label_noise_skew
                ),
                1.0,
            )
            for i in range(n_nonpriority)
        ]
        fractions = [
            min(
                noise_level_for_client(
                    i,
                    n_nonpriority,
                    self.random_data_fraction_factor,
                    self.random_data_fraction_skew,
                ),
                1.0,
            )
            for i in range(n_nonpriority)
        ]
        return flips, fractions

    def to_dict(self):
        return {
            "label_noise_factor": self.label_noise_factor,
            "label_noise_skew": self.label_noise_skew,
            "random_data_fraction_factor": self.random_data_fraction_factor,
            "random_data_fraction_skew": self.random_data_fraction_skew,
        }


# skew tags used for the synthetic sweeps
NOISE_SKEWS = {"low": 0.5, "medium": 1.5, "high": 5.0}


def noise_profile_preset(tag):
    r"""Noise profile with label factor 2.5, data-fraction factor 1 and skew ``tag``."""
    if tag not in NOISE_SKEWS:
        raise InputError(
            'Unknown noise tag "{}"; valid ones are {}.'.format(tag, sorted(NOISE_SKEWS))
        )
    skew = NOISE_SKEWS[tag]
    return NoiseProfile(2.5, skew, 1.0, skew)


def noise_level_for_client(i, n_nonpriority, factor, skew):
    r"""Noise level of the ``i``-th of ``n_nonpriority`` non-priority clients.

    .. math::
        \ell_i = f \left(\frac{i + 1}{M}\right)^{1/s}

    The level is nondecreasing in ``i`` and reaches ``factor`` at the last client; a
    larger skew ``s`` lifts every client towards ``factor``. The value is not clamped;
    callers using it as a probability clamp it to [0, 1].
    """
    if not 0 <= i < n_nonpriority:
        raise InputError(
            "Client index {} out of range [0, {}).".format(i, n_nonpriority)
        )
    if skew <= 0:
        raise InputError("skew should be > 0, got {}.".format(skew))
    return factor * ((i + 1.0) / n_nonpriority) ** (1.0 / skew)


def add_label_noise(ds, flip_prob, rng):
    r"""Replace each label, with probability ``flip_prob``, by a different class.

    The replacement is uniform over the other ``C - 1`` classes.
    """
    if not 0 <= flip_prob <= 1:
        raise InputError("flip_prob should be in [0, 1], got {}.".format(flip_prob))
    n = ds.get_num_samples()
    C = ds.get_num_classes()
    flip = rng.random(n) < flip_prob
    shift = rng.integers(1, C, size=n)
    labels = np.where(flip, (ds.labels + shift) % C, ds.labels)
    return ds.replace(labels=labels)


def add_irrelevant_data(ds, fraction, rng):
    r"""Overwrite ``floor(fraction * n)`` random rows with unrelated samples.

    The new rows have standard normal features and uniformly random labels; the dataset
    size is unchanged.
    """
    if not 0 <= fraction <= 1:
        raise InputError("fraction should be in [0, 1], got {}.".format(fraction))
    n = ds.get_num_samples()
    d = ds.get_num_features()
    m = int(np.floor(fraction * n + 1e-9))
    idx = rng.choice(n, size=m, replace=False)
    features = np.array(ds.features)
    labels = np.array(ds.labels)
    features[idx] = rng.standard_normal((m, d))
    labels[idx] = rng.integers(0, ds.get_num_classes(), size=m)
    return ds.replace(features=features, labels=labels)


def apply_noise(datasets, profile, seed, stream=0):
    r"""Inject the noise of ``profile`` into the non-priority ``datasets``.

    Client ``i`` first gets its label flips and then its irrelevant rows. ``stream``
    separates independent uses of the same seed (e.g. training and test data).
    """
    flips, fractions = profile.levels(len(datasets))
    noisy = []
    for i, ds in enumerate(datasets):
        rng = make_rng(seed, NOISE_STREAM, stream, i)
        ds = add_label_noise(ds, flips[i], rng)
        ds = add_irrelevant_data(ds, fractions[i], rng)
        noisy.append(ds)
        logger.debug(
            "Non-priority client {}: flip_prob={:.4f}, irrelevant_fraction={:.4f}.".format(
                i, flips[i], fractions[i]
            )
        )
    return noisy
