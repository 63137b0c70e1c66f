from typing import List, Tuple

import numpy as np
import pandas as pd


def generate_bench(manifest: pd.DataFrame) -> List[Tuple[int, str, str]]:
    """
    Generate scatterable benchmark directive list from a problem manifest.
    One directive per problem; every solver runs inside the same directive
    so that the reference objective is computed once per problem.

    ### Parameters:
    :param manifest: Manifest DataFrame with problem and path columns.

    ### Returns:
    :return: [(order, problem_name, problem_path)]
    - Positional value of each index in a tuple contained in the scatterable list:
      - 0: position of the problem in the manifest (used to reassemble results)
      - 1: "problem_name"
      - 2: "/path/to/problem.ql1p"
    """
    root = list()
    for order, row in enumerate(manifest.itertuples(index=False)):
        root.append((order, str(row.problem), str(row.path)))

    return root


def slice(directive_list: List, mpi_size: int) -> List[List]:
    """
    Slice up a directive list into a number of chuncks.
    The total number of chunks is determined by how many worker
    nodes are available in the MPI.COMM_WORLD.

    ### Parameters:
    :param directive_list: Directive list to slice into chunks.
    :param mpi_size: Size of the MPI.COMM_WORLD (typically MPI.COMM_WORLD.Get_size()).

    ### Returns:
    :return: List containing desired number of chunks.
    """
    root = list()

    # Split positions rather than the tuples so mixed-type directives survive intact
    for positions in np.array_split(np.arange(len(directive_list)), mpi_size-1):
        root.append([directive_list[i] for i in positions])

    return root


def delegate(communicator, comm_size: int, sliced_directives: List, tag: int = 1) -> List[int]:
    """
    Send task list to every available worker node in the MPI.COMM_WORLD.
    Task list is sent using sliced directive list.

    ### Parameters:
    :param communicator: Communicator variable used to communicate with nodes in the
    MPI.COMM_WORLD (typically comm = MPI.COMM_WORLD).
    :param comm_size: Size of the MPI.COMM_WORLD (typically MPI.COMM_WORLD.Get_size()).
    :param sliced_directives: Sliced directive list containing task to send to the worker nodes.
    :param tag: Message tag of the task lists.

    ### Returns:
    :return: List containing the rank of each worker node in the MPI.COMM_WORLD.
    """
    node_rank = [i+1 for i in range(comm_size-1)]

    for node, task_slice in zip(node_rank, sliced_directives):
        communicator.send(task_slice, dest=node, tag=tag)

    return node_rank


def gather(communicator, node_rank: List[int], tag: int = 2, progress=None) -> List:
    """
    Collect (order, rows) results from every worker and return the rows in directive order.

    ### Parameters:
    :param communicator: MPI communicator.
    :param node_rank: Ranks returned by delegate.
    :param tag: Message tag of the results.
    :param progress: Optional wrapper around the rank iterator (e.g. a tqdm partial).

    ### Returns:
    :return: Flat list of result rows ordered by directive position.
    """
    results = list()
    ranks = node_rank if progress is None else progress(node_rank)
    for node in ranks:
        results.extend(communicator.recv(source=node, tag=tag))

    results.sort(key=lambda item: item[0])
    return [row for _, rows in results for row in rows]
