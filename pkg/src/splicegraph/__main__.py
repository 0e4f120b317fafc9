from __future__ import annotations

from splicegraph.cli import main

raise SystemExit(main())
