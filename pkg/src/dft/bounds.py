"""Enumeration bounds.

The bounds are configuration, not logic: they cap how large a form the
desk-scale enumerations will touch.  Environment variables override the
defaults process-wide; individual calls can pass explicit values.
"""

import os

DEFAULT_SPAN_ORDER = 4096      # lift spans over prime-order isotropic subgroups
DEFAULT_ENUM_ORDER = 256       # full enumeration of all isotropic subgroups
DEFAULT_CYCLO_ORDER = 64       # exact cyclotomic matrix checks
DEFAULT_NONDEG_ORDER = 2048    # non-degeneracy check by full enumeration


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    return int(raw)


def max_span_order():
    return _env_int("DFT_MAX_SPAN_ORDER", DEFAULT_SPAN_ORDER)


def max_enum_order():
    return _env_int("DFT_MAX_ENUM_ORDER", DEFAULT_ENUM_ORDER)


def max_cyclo_order():
    return _env_int("DFT_MAX_CYCLO_ORDER", DEFAULT_CYCLO_ORDER)
