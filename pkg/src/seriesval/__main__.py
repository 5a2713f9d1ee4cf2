import sys

from seriesval.cli.main import main

sys.exit(main())
