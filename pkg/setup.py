# -*- coding: utf-8 -*-
"""
PyISEA setup file
=================
@Author: PyISEA Team
"""

from setuptools import setup

settings = {
    'name': 'PyISEA',
    'version': '0.1.0',
    'description': 'Cycle-stepped simulator of an interposer-based security '
                   'architecture for 2.5D chiplet systems.',
    'author': 'PyISEA Team',
    'license': 'MIT',
    'python_requires': '>=3.8',
    'install_requires': [
        'numpy>=1.20.3'],
    'extras_require': {
        'tests': ['pytest>=7.0']},
    'packages': ['pyisea', 'pyisea.bus', 'pyisea.memory', 'pyisea.policy',
                 'pyisea.scenario', 'pyisea.utils'],
    'package_data': {
        'pyisea': ['scenarios/*.json', 'scenarios/*.img']},
    'entry_points': {
        'console_scripts': ['isea-sim = pyisea.cli:main']}
}

setup(**settings)
