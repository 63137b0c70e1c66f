import json
import os
from typing import Iterable, List, Tuple

import pandas as pd
from tqdm import tqdm

from ..problem.io import SUFFIX, write_problem
from .families import generate

MANIFEST_COLUMNS = ["problem", "family", "seed", "params", "path"]
MANIFEST_NAME = "manifest.csv"


def gen_suite(directives: List[Tuple[str, str, int, dict]], out_dir: str, noprogress: bool = True) -> pd.DataFrame:
    """
    Generate the problems named by suite directives, write them as QL1P files
    and write the manifest CSV next to them.

    ### Parameters:
    :param directives: [(problem_name, family, seed, {"param": value})]
    :param out_dir: Directory receiving <problem_name>.ql1p and manifest.csv.
    :param noprogress: Disable the tqdm progress bar.

    ### Returns:
    :return: Manifest DataFrame with columns problem,family,seed,params,path (absolute paths).
    """
    if os.path.exists(out_dir) is False:
        os.makedirs(out_dir)

    rows = list()
    for name, family, seed, params in tqdm(directives, desc="Problem generation progress", disable=noprogress):
        instance = generate(family, seed, **params)
        path = os.path.join(out_dir, name + SUFFIX)
        write_problem(path, instance.problem)
        rows.append({"problem": name, "family": family, "seed": int(seed),
                     "params": json.dumps(instance.meta["params"], sort_keys=True), "path": name + SUFFIX})

    # CSV paths are relative to the manifest directory
    manifest = pd.DataFrame(rows, columns=MANIFEST_COLUMNS)
    write_manifest(manifest, os.path.join(out_dir, MANIFEST_NAME))
    manifest["path"] = [os.path.abspath(os.path.join(out_dir, p)) for p in manifest["path"]]
    return manifest


def write_manifest(manifest: pd.DataFrame, path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    if os.path.exists(parent) is False:
        os.makedirs(parent)

    manifest.to_csv(path, index=False, columns=MANIFEST_COLUMNS)


def read_manifest(path: str) -> pd.DataFrame:
    """
    Read a manifest CSV. Relative problem paths are resolved against the
    manifest's directory.

    ### Raises:
    - FileNotFoundError
      - Raised if the manifest does not exist.
    - ValueError
      - Raised if required columns are missing.
    """
    if os.path.isfile(path) is False:
        raise FileNotFoundError("Manifest {} not found.".format(path))

    manifest = pd.read_csv(path, dtype={"problem": str, "family": str, "params": str, "path": str},
                           keep_default_na=False)
    missing = [c for c in ("problem", "path") if c not in manifest.columns]
    if missing != []:
        raise ValueError("Manifest {} is missing columns {}.".format(path, ", ".join(missing)))

    root = os.path.dirname(os.path.abspath(path))
    manifest["path"] = [p if os.path.isabs(p) else os.path.join(root, p) for p in manifest["path"]]
    return manifest


def manifest_from_paths(paths: Iterable[str]) -> pd.DataFrame:
    """Manifest for existing QL1P files; problem names are the file stems."""
    rows = list()
    for path in sorted(paths):
        name = os.path.splitext(os.path.basename(path))[0]
        rows.append({"problem": name, "family": "file", "seed": "", "params": "{}", "path": os.path.abspath(path)})

    return pd.DataFrame(rows, columns=MANIFEST_COLUMNS)
