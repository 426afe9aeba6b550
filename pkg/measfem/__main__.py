import sys

from measfem.cli import main

sys.exit(main())
