import sys

from wavekit.cli import main

sys.exit(main())
