import sys

from vitacep.cli.main import main

sys.exit(main())
