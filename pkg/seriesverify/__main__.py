import sys

from seriesverify.api.cli import main

sys.exit(main())
