import sys

from lipdist.cli import main

sys.exit(main())
