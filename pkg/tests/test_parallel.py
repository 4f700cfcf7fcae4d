import numpy as np
import pytest
from fedalign.parallel import parmap
from fedalign.error import InputError


def func(x, y, z=1):
    return x + y + z


def fail_on_two(x):
    if x == 2:
        raise InputError("bad item {}".format(x))
    return x


def test_main():
    X = range(3)
    Y = range(3)
    Xp2 = [x + 2 for x in X]
    XpYp1 = [x + y + 1 for x, y in zip(X, Y)]

    for nprocs in [1, 2]:
        results = parmap(func, X, 1, nprocs=nprocs)
        assert np.array_equal(results, Xp2)

        results = parmap(func, X, 1, 1, nprocs=nprocs)
        assert np.array_equal(results, Xp2)

        results = parmap(func, zip(X, Y), nprocs=nprocs, tuple_X=True)
        assert np.array_equal(results, XpYp1)

        results = parmap(func, zip(X, Y), 1, nprocs=nprocs, tuple_X=True)
        assert np.array_equal(results, XpYp1)


def test_order():
    X = list(range(50))
    assert parmap(func, X, 0, 0, nprocs=4) == X


def test_error():
    with pytest.raises(InputError):
        parmap(fail_on_two, range(4), nprocs=2)
    with pytest.raises(InputError):
        parmap(fail_on_two, range(4), nprocs=1)


if __name__ == "__main__":
    test_main()
    test_order()
