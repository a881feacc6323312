import sys

from cyclegraph.cli import main

sys.exit(main())
