#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
日志初始化
"""

import logging
import os
import sys

from .. import LOGGER_NAME

LOG_FORMAT = '%(asctime)s %(levelname)s %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def init_logging(log_path=None, level=logging.INFO, console=False, command=None):
    """初始化日志系统：文件日志，可选输出到 stderr；重复调用会替换旧的处理器"""
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    formatter = logging.Formatter(LOG_FORMAT, DATE_FORMAT)

    if log_path:
        log_dir = os.path.dirname(log_path)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir, exist_ok=True)
        file_handler = logging.FileHandler(log_path, encoding='utf-8')
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    if console:
        stream_handler = logging.StreamHandler(sys.stderr)
        stream_handler.setLevel(level)
        stream_handler.setFormatter(formatter)
        logger.addHandler(stream_handler)
    if not logger.handlers:
        logger.addHandler(logging.NullHandler())

    logger.info('=' * 50)
    logger.info(f'qimag 启动: {command or ""}')
    logger.info(f'工作目录: {os.getcwd()}')
    logger.info(f'日志文件: {log_path}')
    logger.info('=' * 50)
    return logger
