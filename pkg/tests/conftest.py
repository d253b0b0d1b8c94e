import sys
from pathlib import Path

# oracles.py lives next to the tests and must stay importable without
# being packaged.
sys.path.insert(0, str(Path(__file__).parent))
