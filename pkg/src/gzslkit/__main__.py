from gzslkit.cli import main
import sys

sys.exit(main())
