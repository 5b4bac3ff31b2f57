# This file makes the parsers directory a proper Python package.
