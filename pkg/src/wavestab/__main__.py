import sys

from wavestab.cli import main

sys.exit(main())
