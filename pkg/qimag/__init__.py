#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
qimag - 量子虚性(imaginarity)度量与非局域虚性优势(NAQI)计算工具
"""

__version__ = '1.1.0'

LOGGER_NAME = 'qimag'
