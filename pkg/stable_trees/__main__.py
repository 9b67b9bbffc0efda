from stable_trees.cli.main import main

raise SystemExit(main())
