import os
from typing import List


def getfiles(*paths) -> List:
    """
    Get system file tree structure of passed paths.

    ### Parameters:
    - args
      - paths: Paths to get file tree structure of.

    ### Returns:
    :return: List of system file paths.
    """
    root_list = list()
    for path in paths:
        for root, directories, files in os.walk(path):
            for filename in files:
                root_list.append(os.path.join(root, filename))

    return root_list


def getproblems(problem_path: str, **kwargs) -> List:
    """
    Get the system file paths to problem files below the passed path.

    ### Parameters:
    :param problem_path: Root path to problem files.
    - kwargs
      - format: File suffix of problem files (default: .ql1p).

    ### Returns:
    :return: Sorted list of problem file paths.
    """
    suffix = kwargs.get("format", ".ql1p")
    return sorted(f for f in getfiles(problem_path) if f.lower().endswith(suffix))
