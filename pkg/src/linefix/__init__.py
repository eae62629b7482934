"""Toolkit for learning to localize and repair single broken lines in
C-like programs from compiler diagnostics."""

__version__ = "0.1.0"
