import sys

from greedy_ldp.cli import main

sys.exit(main())
