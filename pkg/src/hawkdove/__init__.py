# -*- coding: utf-8 -*-

"""
Hawkish/dovish stance mining for FOMC communication: corpus filtering, rule-based
classification, document-level measure construction and its econometric and market validation.
"""

__version__ = "0.1.0"
