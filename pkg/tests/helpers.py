"""Shared helpers for the suite."""

from __future__ import annotations

from shipgame.syntax import parse_program


def parse_cut(source: str):
    return parse_program(source, "cut", file_id="component.ship")


def parse_test(source: str, cut=None):
    externals = {c.name: c for c in cut.classes} if cut is not None else None
    return parse_program(source, "test", file_id="tests.ship", externals=externals)
