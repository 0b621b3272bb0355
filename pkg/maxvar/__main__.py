import sys

from maxvar.cli import main

sys.exit(main())
