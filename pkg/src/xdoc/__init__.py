"""Modular toolkit for robust processing of German documents with inline XML annotation."""

__version__ = "0.1.0"
