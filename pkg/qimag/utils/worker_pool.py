#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import logging
import multiprocessing as mp
import os

import psutil

from ..errors import DomainError

logger = logging.getLogger(__name__)

WORKERS_ENV = 'NAQI_WORKERS'


def resolve_worker_count(requested=None, settings=None):
    """命令行 > 环境变量 NAQI_WORKERS > 设置文件 > CPU 核数"""
    value = requested
    source = 'cli'
    if value is None and os.environ.get(WORKERS_ENV):
        value, source = os.environ[WORKERS_ENV], 'env'
    if value is None and settings and settings.get('workers') is not None:
        value, source = settings['workers'], 'settings'
    if value is None:
        return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    try:
        count = int(value)
    except (TypeError, ValueError):
        raise DomainError(f'并行进程数必须为整数, 实际 {value!r} (来源 {source})', field='workers')
    if count < 1:
        raise DomainError(f'并行进程数必须 >= 1, 实际 {count} (来源 {source})', field='workers')
    return count


class WorkerPool:
    """多进程工作池；workers <= 1 时在当前进程内串行执行"""

    def __init__(self, workers=1):
        self.workers = int(workers)
        self._pool = None

    def __enter__(self):
        if self.workers > 1:
            self._pool = mp.Pool(processes=self.workers)
            logger.info(f'启动工作池: {self.workers} 个进程')
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.close()
        else:
            self.stop()
        return False

    def map(self, func, tasks):
        """结果顺序与输入一致"""
        tasks = list(tasks)
        if self._pool is None:
            return [func(t) for t in tasks]
        return self._pool.map(func, tasks)

    def close(self):
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None

    def stop(self):
        """出错或中断时强制结束子进程"""
        if self._pool is None:
            return
        processes = list(getattr(self._pool, '_pool', []))
        try:
            self._pool.terminate()
            self._pool.join()
        except Exception as e:
            logger.error(f'停止工作池时出错: {e}')
        for process in processes:
            if process.is_alive():
                process.kill()
                process.join(timeout=0.1)
        self._pool = None
        logger.warning('工作池已强制停止')
