from __future__ import annotations

from magic_selftest.cli import main

raise SystemExit(main())
