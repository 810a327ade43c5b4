import sys
from pathlib import Path

# make the oracle helpers (rfc3986_ref, etc.) importable from any test
sys.path.insert(0, str(Path(__file__).parent))
