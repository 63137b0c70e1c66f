import json
import os

import pandas as pd
import pytest

from utils.appinfo.info import license_text, version_text
from utils.filesystem.getpaths import getproblems
from utils.managerops.unwrap import unwrap_suite
from utils.managerops.xml2dict import xml2dict
from utils.workeradmin.greenlight import killmsg
from utils.workerops import scattershot


class FakeComm:
    """Records point-to-point sends and replays queued receives."""

    def __init__(self, replies=None):
        self.sent = list()
        self.replies = replies if replies is not None else dict()

    def send(self, obj, dest, tag):
        self.sent.append((dest, tag, obj))

    def recv(self, source, tag):
        return self.replies[source]


@pytest.fixture(scope="module")
def desk_suite(root_path):
    with open(os.path.join(root_path, ".config.json"), "rt") as fin:
        config = json.load(fin)

    return xml2dict(os.path.join(root_path, "etc", "suites", "desk_suite.xml"), config)


class TestSuiteControlFile:

    def test_families(self, desk_suite):
        assert desk_suite["name"] == "desk"
        assert [f["tag"] for f in desk_suite["families"]] == ["myrand", "spectra", "sigrec", "strict"]
        myrand = desk_suite["families"][0]
        assert myrand["seed"] == 11
        assert [name for name, _ in myrand["regimes"]] == ["s", "i", "m"]
        assert myrand["taus"] == [10.0, 100.0, 1000.0, 10000.0]
        assert "tau" not in myrand["params"]

    def test_unwrap(self, desk_suite):
        directives = unwrap_suite(desk_suite)
        assert len(directives) == 48
        assert len(set(d[0] for d in directives)) == 48
        assert directives[0] == ("myrands1", "elastic_net", 11,
                                 {"m": 250, "n": 500, "scale": 2000.0, "gamma": 0.0, "tau": 10.0})

    def test_seeds_follow_regime_and_tau(self, desk_suite):
        by_name = {d[0]: d for d in unwrap_suite(desk_suite)}
        assert by_name["myrandi3"][2] == 11 + 100 + 2
        assert by_name["strictc61"][2] == 41 + 200
        assert by_name["strictc61"][3]["cond_target"] == 1e6
        assert by_name["strictc61"][3]["L"] == 1.0

    def test_directives_do_not_share_parameters(self, desk_suite):
        directives = unwrap_suite(desk_suite)
        directives[0][3]["m"] = -1
        assert directives[1][3]["m"] == 250

    def test_missing_tau(self, tmp_path):
        path = tmp_path / "bad.xml"
        path.write_text('<suite name="bad"><family type="sigrec" tag="x"><seed value="1"/></family></suite>')
        with pytest.raises(ValueError):
            xml2dict(str(path), dict())

    def test_duplicate_names(self):
        family = {"type": "sigrec", "tag": "x", "seed": 1, "params": {}, "regimes": [("", {})], "taus": [0.1]}
        with pytest.raises(ValueError):
            unwrap_suite({"name": "dup", "families": [family, dict(family)]})

    def test_values_take_the_type_of_their_field(self, tmp_path):
        path = tmp_path / "typed.xml"
        path.write_text('<suite name="typed"><family type="strict_comp" tag="x"><seed value="7"/>'
                        '<n value="2e2"/><nnz value="20" type="int"/><margin value="0.25"/>'
                        '<regime name="c"><cond_target value="1e4"/></regime>'
                        '<tau value="1e-3"/></family></suite>')
        family = xml2dict(str(path), dict())["families"][0]
        assert family["seed"] == 7 and isinstance(family["seed"], int)
        assert family["params"] == {"n": 200, "nnz": 20, "margin": 0.25}
        assert isinstance(family["params"]["n"], int)
        assert family["regimes"] == [("c", {"cond_target": 1e4})]
        assert isinstance(family["regimes"][0][1]["cond_target"], float)
        assert family["taus"] == [0.001]

    @pytest.mark.parametrize("element", ['<n value="2.5"/>', '<n value="200" type="float"/>',
                                         '<margin value="wide"/>', '<margin value="nan"/>',
                                         '<margin value="0.2" type="str"/>'])
    def test_bad_values(self, tmp_path, element):
        path = tmp_path / "bad.xml"
        path.write_text('<suite name="bad"><family type="strict_comp" tag="x"><seed value="1"/>{}'
                        '<tau value="0.1"/></family></suite>'.format(element))
        with pytest.raises(ValueError):
            xml2dict(str(path), dict())


class TestScattershot:

    def test_generate_bench(self):
        manifest = pd.DataFrame({"problem": ["a", "b"], "path": ["/p/a.ql1p", "/p/b.ql1p"]})
        assert scattershot.generate_bench(manifest) == [(0, "a", "/p/a.ql1p"), (1, "b", "/p/b.ql1p")]

    def test_slice(self):
        directives = [(i, str(i), "/p") for i in range(5)]
        chunks = scattershot.slice(directives, 3)
        assert [len(c) for c in chunks] == [3, 2]
        assert [d for c in chunks for d in c] == directives

    def test_slice_with_more_workers_than_tasks(self):
        chunks = scattershot.slice([(0, "a", "/p")], 4)
        assert [len(c) for c in chunks] == [1, 0, 0]

    def test_delegate_and_gather(self):
        comm = FakeComm(replies={1: [(2, ["c"])], 2: [(0, ["a1", "a2"]), (1, [])]})
        ranks = scattershot.delegate(comm, 3, [["t0"], ["t1"]])
        assert ranks == [1, 2]
        assert comm.sent == [(1, 1, ["t0"]), (2, 1, ["t1"])]
        assert scattershot.gather(comm, ranks) == ["a1", "a2", "c"]

    def test_killmsg(self):
        comm = FakeComm()
        killmsg(comm, 3, True)
        killmsg(comm, 2)
        assert comm.sent == [(1, 0, 0), (2, 0, 0), (1, 0, 1)]


def test_getproblems(tmp_path):
    (tmp_path / "nested").mkdir()
    for name in ("b.ql1p", "nested/a.QL1P", "notes.txt"):
        (tmp_path / name).write_bytes(b"")

    found = getproblems(str(tmp_path))
    assert [os.path.relpath(p, str(tmp_path)) for p in found] == ["b.ql1p", os.path.join("nested", "a.QL1P")]


def test_version_and_license_text(root_path):
    text = version_text("ql1pipe", "0.1.0", "2026", "ql1pipe developers",
                        ascii_banner=os.path.join(root_path, "assets", "missing_banner.txt"))
    assert text.startswith("ql1pipe v0.1.0  Copyright (C) 2026  ql1pipe developers")
    assert "GNU GPLv3" in text
    assert "GNU General Public License" in license_text("desc", "2026", "someone")
