import logging
import numpy as np
from ..dataset import concatenate
from ..error import InputError
from ..log import log_entry

logger = logging.getLogger(__name__)


def shard_partition(ds, n_shards, shards_per_client, rng):
    r"""Split a dataset into label-sorted shards and deal them out to clients.

    The dataset is sorted by label (stable) and cut into ``n_shards`` contiguous shards of
    equal size, so each shard holds a single class whenever the class counts are multiples
    of the shard size. Shards mixing classes are reported with a warning. Each of the
    ``n_shards / shards_per_client`` clients then receives ``shards_per_client`` shards
    chosen by a random permutation.

    Parameters
    ----------
    ds: LabeledDataset

    n_shards: int
        Number of shards; must divide the number of samples.

    shards_per_client: int
        Shards given to each client; must divide ``n_shards``.

    rng: numpy.random.Generator

    Return
    ------
    list of LabeledDataset
    """
    n = ds.get_num_samples()
    if n_shards < 1 or shards_per_client < 1:
        raise InputError("n_shards and shards_per_client should be >= 1.")
    if n % n_shards != 0:
        raise InputError(
            "{} samples cannot be cut into {} equal shards.".format(n, n_shards)
        )
    if n_shards % shards_per_client != 0:
        raise InputError(
            "{} shards cannot be dealt {} per client.".format(n_shards, shards_per_client)
        )

    shard_size = n // n_shards
    ordered = ds.sort_by_label()
    shards = [
        ordered.subset(np.arange(s * shard_size, (s + 1) * shard_size))
        for s in range(n_shards)
    ]
    mixed = sum(1 for s in shards if len(np.unique(s.labels)) > 1)
    if mixed > 0:
        log_entry(
            logger,
            "{} of {} shards hold more than one class; the class counts are not "
            "multiples of the shard size {}.".format(mixed, n_shards, shard_size),
            level="warning",
        )

    order = rng.permutation(n_shards)
    n_clients = n_shards // shards_per_client
    clients = []
    for c in range(n_clients):
        mine = order[c * shards_per_client : (c + 1) * shards_per_client]
        clients.append(concatenate([shards[s] for s in mine]))

    logger.info(
        "Partitioned {} samples into {} clients of {} shards.".format(
            n, n_clients, shards_per_client
        )
    )
    return clients
