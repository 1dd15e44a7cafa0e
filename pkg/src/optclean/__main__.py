import sys

from optclean.cli import main

sys.exit(main())
