import sys

from g2pstack.cli import main

if __name__ == "__main__":
    sys.exit(main())
