import textwrap
import numpy as np


def make_rng(seed, *stream):
    r"""Create a random generator for a named sub-stream of ``seed``.

    Generators are keyed by ``(seed, *stream)`` through ``numpy.random.SeedSequence``, so
    the draws of one stream (e.g. client 3 in round 7) never depend on how many numbers
    other streams consumed, nor on the order in which streams are created.

    Parameters
    ----------
    seed: int
        Experiment seed (64-bit non-negative integer).

    stream: int
        Extra non-negative integers identifying the sub-stream.

    Return
    ------
    numpy.random.Generator
        A PCG64 generator.
    """
    entropy = [int(seed)] + [int(s) for s in stream]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def power_iteration(matvec, size, n_iter=200, tol=1e-10, rng=None):
    r"""Estimate the largest eigenvalue of a symmetric positive semi-definite operator.

    Parameters
    ----------
    matvec: function
        Function mapping a 1D array of length ``size`` to the operator applied to it.

    size: int
        Dimension of the operator.

    n_iter: int
        Maximum number of iterations.

    tol: float
        Stop when the relative change of the Rayleigh quotient is below ``tol``.

    rng: numpy.random.Generator (optional)
        Generator for the starting vector. A fixed one is used if ``None``.

    Return
    ------
    float
        The Rayleigh quotient at the final iterate.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    v = rng.standard_normal(size)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(n_iter):
        u = matvec(v)
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return 0.0
        new_lam = float(np.dot(v, u))
        v = u / norm
        if abs(new_lam - lam) <= tol * max(abs(new_lam), 1.0):
            lam = new_lam
            break
        lam = new_lam
    return lam


def split_string(string, length=80, starter=None):
    r"""Wrap ``string`` into lines of at most ``length`` characters, newline-terminated.

    ``starter`` (followed by a space) is prepended to every line and counts towards
    ``length``.
    """
    prefix = "" if starter is None else starter + " "
    lines = textwrap.wrap(
        string, width=length, initial_indent=prefix, subsequent_indent=prefix
    )
    return "\n".join(lines) + "\n"
