import sys

from qwa_sim.cli import main

sys.exit(main())
