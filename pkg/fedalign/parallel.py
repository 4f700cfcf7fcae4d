import multiprocessing as mp


def parmap(f, X, *args, tuple_X=False, nprocs=1):
    r"""Apply ``f`` to every item of ``X`` using a pool of worker processes.

    This mimics ``multiprocessing.Pool.map`` but allows extra arguments to be passed to
    ``f``. Results are returned in the order of ``X`` regardless of which worker finished
    first, so a parallel run is indistinguishable from a serial one.

    Parameters
    ----------
    f: function
        The function that operates on the data. Must be picklable when ``nprocs > 1``.

    X: iterable
        Data to be mapped over.

    args: args
        Extra positional arguments passed to ``f`` after the item.

    tuple_X: bool
        If ``True``, each item of ``X`` is a tuple unpacked into the leading positional
        arguments of ``f``.

    nprocs: int
        Number of worker processes. With ``nprocs <= 1`` everything runs in the calling
        process.

    Return
    ------
    list
        A list of results, corresponding to ``X``.

    Example
    -------
    >>> def func(x, y, z=1):
    >>>     return x+y+z
    >>> parmap(func, range(3), 1, nprocs=2)  # [2,3,4]
    >>> parmap(func, zip(range(3), range(3)), tuple_X=True, nprocs=2)  # [1,3,5]
    """
    items = [tuple(x) if tuple_X else (x,) for x in X]

    if nprocs <= 1 or len(items) <= 1:
        return [f(*x, *args) for x in items]

    nprocs = min(nprocs, len(items))
    q_in = mp.Queue()
    q_out = mp.Queue()

    processes = []
    for _ in range(nprocs):
        p = mp.Process(target=_worker, args=(f, q_in, q_out))
        p.daemon = True
        p.start()
        processes.append(p)

    for i, x in enumerate(items):
        q_in.put((i, x, args))
    for _ in range(nprocs):
        q_in.put((None, None, None))

    results = [q_out.get() for _ in range(len(items))]
    for p in processes:
        p.join()

    results = sorted(results, key=lambda r: r[0])
    for _, ok, value in results:
        if not ok:
            raise value
    return [value for _, _, value in results]


def _worker(f, q_in, q_out):
    while True:
        i, x, args = q_in.get()
        if i is None:
            break
        try:
            q_out.put((i, True, f(*x, *args)))
        except Exception as e:
            q_out.put((i, False, e))
