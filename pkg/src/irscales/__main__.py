from irscales.cli import main
import sys

sys.exit(main())
