"""Stability criteria for polarized group compactifications."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("group-kstability")
except PackageNotFoundError:
    __version__ = "dev"
