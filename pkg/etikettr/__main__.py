import sys

from etikettr.cli import main


sys.exit(main())
