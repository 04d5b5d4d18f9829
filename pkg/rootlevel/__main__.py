import sys

from rootlevel.cli import main

sys.exit(main())
