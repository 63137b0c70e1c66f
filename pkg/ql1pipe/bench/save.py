import json
import os
from typing import List, Tuple

import pandas as pd

from ..solver.trace import RunTrace


def _parent(file_path: str) -> None:
    parent = os.path.dirname(os.path.abspath(file_path))
    if os.path.exists(parent) is False:
        os.makedirs(parent)


def dataframe(file_path: str, dataset: pd.DataFrame) -> None:
    """
    Save a Pandas DataFrame as an uncompressed .csv file with a header row.

    ### Parameters:
    :param file_path: System location of the .csv file. Parent directories are created.
    :param dataset: Pandas DataFrame to save.
    """
    _parent(file_path)
    dataset.to_csv(file_path, index=False, float_format="%.17g")


def trace(file_path: str, run: RunTrace, seconds: bool = False) -> None:
    """
    Save a solver trace as CSV with header mv,k,F,nnz,step.

    ### Parameters:
    :param file_path: System location of the trace file.
    :param run: RunTrace to save.
    :param seconds: Append the wall-time column.
    """
    dataframe(file_path, run.to_frame(seconds=seconds))


def pareto(file_path: str, frontier: List[Tuple[float, int]]) -> None:
    dataframe(file_path, pd.DataFrame(frontier, columns=["accuracy", "nnz"]))


def histogram(file_path: str, phases: List[Tuple[int, int]]) -> None:
    dataframe(file_path, pd.DataFrame(phases, columns=["phase", "cg_steps"]))


def dictionary(file_path: str, dictdata: dict) -> None:
    """
    Save a Python dictionary to a .json file. Dictionary must
    be considered well-formed JSON data.

    ### Parameters:
    :param file_path: System location of the .json file.
    :param dictdata: Dictionary to save.
    """
    _parent(file_path)
    with open(file_path, "wt") as fout:
        fout.write(json.dumps(dictdata, indent=2))
