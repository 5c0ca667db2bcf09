import sys
from pathlib import Path

# Make oracles.py importable from every test module regardless of how
# pytest was invoked.
sys.path.insert(0, str(Path(__file__).parent))
