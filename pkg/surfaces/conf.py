# surfaces/conf.py
"""
Numerical defaults for the geometry modules.

Values come from ``settings.GEODEV`` when Django is configured, otherwise from
``DEFAULTS``. Keys are looked up on every call so ``override_settings`` works
in tests; ``override()`` scopes a change to one command run.
"""
from __future__ import annotations

from contextlib import contextmanager
from typing import Any, Iterator

DEFAULTS: dict[str, Any] = {
    "DIV_EPS": 1e-300,
    "REG_EPS": 1e-12,
    "CLASSIFY_TOL": 1e-8,
    "KAPPA_EPS": 1e-10,
    "ROOT_TOL": 1e-9,
    "VERIFY_TOL": 1e-8,
    "ZERO_FORM_TOL": 1e-10,
    "MERGE_TOL": 1e-7,
    "TRACE_TOL": 1e-6,
    "ORACLE_ANGLE_TOL": 1e-6,
    "FD_TOL": 1e-5,
    "FD3_TOL": 1e-3,
    "TAYLOR_SLOPE_MIN": 3.8,
    "WORKERS": 1,
}

_overrides: dict[str, Any] = {}


def get(key: str) -> Any:
    if key in _overrides:
        return _overrides[key]
    try:
        from django.conf import settings

        if settings.configured:
            configured = getattr(settings, "GEODEV", None) or {}
            if configured.get(key) is not None:
                return configured[key]
    except ImportError:
        pass
    return DEFAULTS[key]


@contextmanager
def override(**values: Any) -> Iterator[None]:
    unknown = set(values) - set(DEFAULTS)
    if unknown:
        raise KeyError(f"unknown GEODEV keys: {sorted(unknown)}")
    saved = dict(_overrides)
    _overrides.update({k: v for k, v in values.items() if v is not None})
    try:
        yield
    finally:
        _overrides.clear()
        _overrides.update(saved)
