import sys

from hmtune.cli import main

sys.exit(main())
