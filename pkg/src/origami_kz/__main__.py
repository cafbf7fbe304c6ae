import sys

from origami_kz.cli import main

sys.exit(main())
