import sys

from ergorate.cli import main

sys.exit(main())
