import sys

from lenscs.report.cli import main

sys.exit(main())
