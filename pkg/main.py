#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import logging
import sys
import traceback

from qimag import LOGGER_NAME
from qimag.cli import main
from qimag.utils.i18n import get_text


def global_exception_handler(exc_type, exc_value, exc_traceback):
    """全局异常处理器：写日志并打印简短信息"""
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc_value, exc_traceback)
        return
    logger = logging.getLogger(LOGGER_NAME)
    logger.error('未处理的异常:\n' + ''.join(traceback.format_exception(exc_type, exc_value, exc_traceback)))
    print("=" * 50, file=sys.stderr)
    print(f"{get_text('unexpected_error')}: {exc_type.__name__}: {exc_value}", file=sys.stderr)
    traceback.print_tb(exc_traceback)
    print("=" * 50, file=sys.stderr)


if __name__ == '__main__':
    # 设置全局异常处理器
    sys.excepthook = global_exception_handler
    sys.exit(main())
