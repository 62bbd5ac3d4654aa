import numpy as np
import pytest

from gpdt.groupoid import (build_group, build_hls_truncation, build_pair, build_transformation,
                           disjoint_union, groupoid_from_group)
from gpdt.groups import cyclic_group, sl2_mod


def _zoo():
    s3 = build_group([[1, 0, 2], [1, 2, 0]])
    z4 = groupoid_from_group(cyclic_group(4))
    return {
        "P1": build_pair(1),
        "P2": build_pair(2),
        "P4": build_pair(4),
        "Z2": groupoid_from_group(cyclic_group(2)),
        "Z5": groupoid_from_group(cyclic_group(5)),
        "S3": s3,
        "SL2(3)": groupoid_from_group(sl2_mod(3)),
        "S3 on 3 points": build_transformation(s3, 3, s3.group.rows),
        # Z/4 acting on 6 points by x -> x + 3g (mod 6): orbits {0,3},{1,4},{2,5}
        "Z4 on 6 points": build_transformation(z4, 6, (np.arange(6)[None, :] + 3 * np.arange(4)[:, None]) % 6),
        "P2+P3": disjoint_union(build_pair(2), build_pair(3)),
        "Z3+S3": disjoint_union(groupoid_from_group(cyclic_group(3)), s3),
        "HLS Z pow2 4": build_hls_truncation("Z", [2, 4, 8, 16]).groupoid,
        "HLS Z pow3 2": build_hls_truncation("Z", [3, 9]).groupoid,
        "HLS SL2Z 2,4": build_hls_truncation("SL2Z", [2, 4]).groupoid,
    }


ZOO = _zoo()


@pytest.fixture(scope="session")
def zoo():
    return ZOO


@pytest.fixture(params=sorted(ZOO), scope="session")
def groupoid(request):
    return ZOO[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(0x5EED)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.line(line)
