# -*- coding: utf-8 -*-
import sys

from pyisea.cli import main

sys.exit(main())
