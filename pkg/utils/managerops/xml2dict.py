import copy
import math
from typing import Optional, Union

from bs4 import BeautifulSoup

FIELD_TYPES = {"tau": "float", "gamma": "float", "cond_target": "float", "scale": "float",
               "noise_sigma": "float", "margin": "float", "L": "float",
               "m": "int", "n": "int", "nnz": "int", "signal_nnz": "int", "seed": "int"}


def xml2dict(xml_file: str, config_dict: dict) -> dict:
    """
    Convert a suite XML control file to an easily processable dictionary.

    ### Parameters:
    :param xml_file: System file path reference to XML control file.
    :param config_dict: Global ql1pipe configuration dictionary. Per-family
    generator defaults are read from its "generators" key.

    ### Returns:
    :return: {"name": suite_name, "families": [{"type", "tag", "seed", "params",
    "regimes": [(regime_name, {param: value})], "taus": [tau]}]}

    ### Raises:
    - KeyError
      - Raised if a required attribute (type, tag, name, value) is missing.
    - ValueError
      - Raised if a family has no tau values or no seed, or if a value does not
        convert to the type of its field.
    """
    fin = open(xml_file, "rt"); xml_data = fin.read(); fin.close()
    soup = BeautifulSoup(xml_data, "xml")

    suite = soup.find("suite")
    if suite is None:
        raise ValueError("Control file {} has no <suite> element.".format(xml_file))

    d = dict()
    d["name"] = suite.get("name", "suite")
    d["families"] = list()

    defaults = config_dict.get("generators", dict())
    for family in suite.find_all("family", recursive=False):
        family_type = family["type"]
        entry = {"type": family_type, "tag": family["tag"], "seed": None,
                 "params": copy.deepcopy(defaults.get(family_type, dict())),
                 "regimes": list(), "taus": list()}

        for element in family.find_all(recursive=False):
            if element.name == "regime":
                regime_params = dict()
                for param in element.find_all(recursive=False):
                    regime_params[param.name] = _data_converter(param.name, param["value"], param.get("type"))

                entry["regimes"].append((element["name"], regime_params))

            elif element.name == "tau":
                entry["taus"].append(_data_converter("tau", element["value"], element.get("type")))

            elif element.name == "seed":
                entry["seed"] = _data_converter("seed", element["value"], element.get("type"))

            else:
                entry["params"][element.name] = _data_converter(element.name, element["value"], element.get("type"))

        if entry["taus"] == []:
            raise ValueError("Family {} in {} lists no <tau> values.".format(entry["tag"], xml_file))

        if entry["seed"] is None:
            raise ValueError("Family {} in {} has no <seed>.".format(entry["tag"], xml_file))

        if entry["regimes"] == []:
            entry["regimes"].append(("", dict()))

        entry["params"].pop("tau", None)
        d["families"].append(entry)

    return d


def _data_converter(field: str, data: str, deftype: Optional[str] = None) -> Union[int, float]:
    """
    Convert the value attribute of a suite element to a number.

    Generator fields have a fixed type (FIELD_TYPES); an explicit type
    attribute must agree with it. Fields outside the table default to float.
    Scientific notation is accepted for both types, so "1e3" is a valid int.

    ### Parameters:
    :param field: Element name, e.g. tau, gamma or cond_target.
    :param data: Value attribute as written in the control file.
    :param deftype: Type attribute, int|float, or None when absent.

    ### Returns:
    :return: Finite int or float.

    ### Raises:
    - ValueError
      - Raised on an unsupported or conflicting type, a non-numeric or
        non-finite value, or a fractional value for an int field.
    """
    expected = FIELD_TYPES.get(field)
    if deftype is None:
        deftype = expected if expected is not None else "float"

    if deftype not in ("int", "float"):
        raise ValueError("<{}> has unsupported type {}; use int or float.".format(field, deftype))

    if expected is not None and deftype != expected:
        raise ValueError("<{}> is declared {} but must be {}.".format(field, deftype, expected))

    try:
        value = float(data)

    except ValueError:
        raise ValueError("<{}> value {} is not a number.".format(field, data)) from None

    if not math.isfinite(value):
        raise ValueError("<{}> value {} is not finite.".format(field, data))

    if deftype == "int":
        if not value.is_integer():
            raise ValueError("<{}> value {} is not an integer.".format(field, data))

        return int(value)

    return value
