import sys

from sparse_evolve.cli import main

sys.exit(main())
