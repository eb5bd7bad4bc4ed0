import sys

from rss_locate.cli import main

sys.exit(main())
