#!/usr/bin/env python3
"""
Script para ejecutar la segmentación por lotes sin instalar el paquete
"""

import sys

from rootlevel.cli import main

if __name__ == "__main__":
    sys.exit(main())
