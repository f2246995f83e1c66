import sys

from zxopt.cli import main

sys.exit(main())
