# ══════════════════════════════════════════════════════════════
# main.py — PUNTO DE ENTRADA
# ══════════════════════════════════════════════════════════════
#
#   python main.py bound --model fisher --m 2 --method surface-upper --degree 8
#   python main.py table fisher-degrees --jobs 4
#   python main.py oracle --model autocat --D 2

import sys

from cli import main


if __name__ == "__main__":
    sys.exit(main())
