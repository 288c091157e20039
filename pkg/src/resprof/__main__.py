import sys

from resprof.cli import main

sys.exit(main())
