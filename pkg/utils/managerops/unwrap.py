import copy
from typing import List, Tuple


def unwrap_suite(suite_dict: dict) -> List[Tuple[str, str, int, dict]]:
    """
    Convert a suite control dictionary to a lower-level directive list.
    Each family x regime x tau combination becomes one problem named
    <tag><regime><tau index>, with seed = family seed + 100 * regime index + tau index.

    ### Parameters:
    :param suite_dict: Suite control dictionary produced by xml2dict.

    ### Returns:
    :return: [(problem_name, family, seed, {"param": value})]
    - Positional value of each index:
      - 0: "problem_name"
      - 1: "family_type"
      - 2: seed
      - 3: {"generator_param": value}
    """
    root = list()

    for family in suite_dict["families"]:
        for r_index, (regime_name, regime_params) in enumerate(family["regimes"]):
            for t_index, tau in enumerate(family["taus"]):
                # Use deepcopy so problems never share parameter dictionaries
                params = copy.deepcopy(family["params"])
                params.update(copy.deepcopy(regime_params))
                params["tau"] = tau

                name = "{}{}{}".format(family["tag"], regime_name, t_index + 1)
                seed = family["seed"] + 100 * r_index + t_index
                root.append((name, family["type"], seed, params))

    names = [directive[0] for directive in root]
    if len(set(names)) != len(names):
        raise ValueError("Suite {} produces duplicate problem names.".format(suite_dict.get("name")))

    return root
