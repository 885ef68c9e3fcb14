"""Computational companion for topologies on semigroups and their verification suites."""
from __future__ import annotations

__version__ = "0.1.0"
