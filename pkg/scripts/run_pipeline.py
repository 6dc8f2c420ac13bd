"""
Pipeline Script
Dense Survival Forest Subgroup Profiler
"""

import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.main import main

if __name__ == "__main__":
    sys.exit(main(["run", *sys.argv[1:]]))
