"""Regression constants produced by ``python3 tests/oracles.py`` (numpy.linalg.eigvalsh on independently built matrices)."""

SL2_GAPS = {
    3: 1.438447187191168,
    5: 0.3006848042362761,
    7: 0.2524050163203888,
    11: 0.17672509523122937,
    13: 0.1532290447003891,
}
EXPANDER_GAPS = {
    16: 0.5381832600123848,
    24: 0.40926747619498804,
    32: 0.24261226903643046,
    48: 0.14758774607617967,
    64: 0.1538322530189235,
    96: 0.22232288592726945,
    128: 0.2740459945223023,
    160: 0.22933073016428884,
}
Z_POW2_10_LAST = 3.764943479778182e-05
