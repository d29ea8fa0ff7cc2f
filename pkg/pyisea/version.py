# separeted file to get version information without importing pyisea lib
__author__ = "PyISEA Team"
__date__ = "19 October 2026"
__version__ = "0.1.0"
