import os

import numpy as np

from .operator import CountingOperator, OperatorKind
from .quadratic import QuadraticProblem

MAGIC = b"QL1P"
VERSION = 1
SUFFIX = ".ql1p"


class ProblemFormatError(ValueError):
    """Raised when a QL1P file is malformed."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__("{} (byte offset {})".format(message, offset))
        self.offset = offset


def write_problem(path: str, P: QuadraticProblem) -> None:
    """
    Write a problem to a little-endian QL1P file.

    ### Parameters:
    :param path: System file path to write to. Parent directories are created.
    :param P: Problem to serialize.
    """
    parent = os.path.dirname(os.path.abspath(path))
    if os.path.exists(parent) is False:
        os.makedirs(parent)

    op = P.op
    chunks = [MAGIC, np.array([VERSION], dtype="<u4").tobytes(),
              np.array([op.kind.value], dtype="<u1").tobytes(),
              np.array([op.n], dtype="<u8").tobytes()]

    if op.kind is OperatorKind.DENSE:
        chunks.append(op.a.astype("<f8").tobytes(order="C"))

    else:
        chunks.append(np.array([op.B.shape[0]], dtype="<u8").tobytes())
        chunks.append(op.B.astype("<f8").tobytes(order="C"))
        chunks.append(np.array([op.gamma], dtype="<f8").tobytes())

    chunks.append(P.b.astype("<f8").tobytes())
    chunks.append(np.array([P.tau], dtype="<f8").tobytes())

    with open(path, "wb") as fout:
        fout.write(b"".join(chunks))


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def take(self, dtype: str, count: int, what: str) -> np.ndarray:
        itemsize = np.dtype(dtype).itemsize
        need = itemsize * count
        if self.offset + need > len(self.data):
            raise ProblemFormatError("Truncated file while reading {}: expected length {} bytes, actual length {} bytes"
                                     .format(what, self.offset + need, len(self.data)), self.offset)

        values = np.frombuffer(self.data, dtype=dtype, count=count, offset=self.offset)
        self.offset += need
        return values


def read_problem(path: str, validate: bool = True) -> QuadraticProblem:
    """
    Read a QL1P problem file.

    ### Parameters:
    :param path: System file path to the QL1P file.
    :param validate: Run the operator probes on the loaded problem.

    ### Returns:
    :return: QuadraticProblem with a fresh operator counter.

    ### Raises:
    - FileNotFoundError
      - Raised if path does not exist.
    - ProblemFormatError
      - Raised on bad magic, unsupported version, unknown kind, truncation or trailing bytes.
    """
    if os.path.isfile(path) is False:
        raise FileNotFoundError("Problem file {} not found.".format(path))

    with open(path, "rb") as fin:
        data = fin.read()

    reader = _Reader(data)
    magic = bytes(reader.take("<u1", 4, "magic"))
    if magic != MAGIC:
        raise ProblemFormatError("Bad magic {!r}, expected {!r}".format(magic, MAGIC), 0)

    version = int(reader.take("<u4", 1, "version")[0])
    if version != VERSION:
        raise ProblemFormatError("Unsupported version {}, expected {}".format(version, VERSION), 4)

    kind_offset = reader.offset
    kind = int(reader.take("<u1", 1, "kind")[0])
    n_offset = reader.offset
    n = int(reader.take("<u8", 1, "n")[0])
    if n < 1:
        raise ProblemFormatError("Dimension n must be positive, got {}".format(n), n_offset)

    if kind == OperatorKind.DENSE.value:
        a = reader.take("<f8", n * n, "dense matrix").reshape(n, n).astype(np.float64)
        op = CountingOperator.dense(a)

    elif kind == OperatorKind.FACTORED.value:
        m = int(reader.take("<u8", 1, "m")[0])
        B = reader.take("<f8", m * n, "factor matrix").reshape(m, n).astype(np.float64)
        gamma = float(reader.take("<f8", 1, "gamma")[0])
        op = CountingOperator.factored(B, gamma)

    else:
        raise ProblemFormatError("Unknown operator kind {}".format(kind), kind_offset)

    b = reader.take("<f8", n, "b").astype(np.float64)
    tau = float(reader.take("<f8", 1, "tau")[0])

    if reader.offset != len(data):
        raise ProblemFormatError("Trailing data: expected length {} bytes, actual length {} bytes"
                                 .format(reader.offset, len(data)), reader.offset)

    return QuadraticProblem(op, b, tau, validate=validate)
