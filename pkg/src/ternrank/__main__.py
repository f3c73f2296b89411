import sys

from ternrank.cli import main

sys.exit(main())
