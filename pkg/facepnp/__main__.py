from facepnp.cli import main

raise SystemExit(main())
