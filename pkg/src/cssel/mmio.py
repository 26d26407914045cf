"""Matrix Market and CSV readers/writers for dense real matrices.

The format is chosen by file extension: ``.mtx``/``.mm`` for Matrix Market,
anything else for CSV (comma separated, one row per line, ``#`` comments).
"""
import os

import numpy as np
import scipy.io
import scipy.sparse

from .errors import InvalidInput
from .linalg import as_matrix

MM_EXTENSIONS = (".mtx", ".mm")


def is_matrix_market(path):
    return os.fspath(path).lower().endswith(MM_EXTENSIONS)


def read_matrix_market(path):
    # mmread handles both array and coordinate layouts
    try:
        M = scipy.io.mmread(os.fspath(path))
    except ValueError as exc:
        raise InvalidInput(f"{path}: not a valid Matrix Market file: {exc}") from exc
    if scipy.sparse.issparse(M):
        M = M.toarray()
    if np.iscomplexobj(M):
        raise InvalidInput(f"{path}: complex matrices are not supported")
    return as_matrix(M)


def write_matrix_market(path, A, comment="", coordinate=False):
    A = as_matrix(A)
    data = scipy.sparse.coo_matrix(A) if coordinate else A
    scipy.io.mmwrite(os.fspath(path), data, comment=comment, field="real",
                     precision=17, symmetry="general")


def read_csv(path):
    try:
        M = np.loadtxt(os.fspath(path), delimiter=",", comments="#", ndmin=2)
    except ValueError as exc:
        raise InvalidInput(f"{path}: malformed CSV: {exc}") from exc
    return as_matrix(M)


def write_csv(path, A, comment=""):
    A = as_matrix(A)
    np.savetxt(os.fspath(path), A, delimiter=",", fmt="%.17g", header=comment,
               comments="# ")


def read_matrix(path):
    if is_matrix_market(path):
        return read_matrix_market(path)
    return read_csv(path)


def write_matrix(path, A, comment=""):
    if is_matrix_market(path):
        write_matrix_market(path, A, comment=comment)
    else:
        write_csv(path, A, comment=comment)
