"""Module entry point: ``python -m hypaq``."""

from .cli import main

raise SystemExit(main())
