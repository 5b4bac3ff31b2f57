# This file makes the modules directory a proper Python package.
