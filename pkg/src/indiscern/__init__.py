"""Finite-model toolkit for indiscernibility, rigid extensions and quotients."""

__version__ = "0.1.0"
