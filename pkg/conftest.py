# conftest.py - Put the project root on the import path for the test suite

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
