"""Module execution entry point for `python -m group_kstab.cli`."""

from __future__ import annotations

from group_kstab.cli import main

if __name__ == "__main__":
    main()
