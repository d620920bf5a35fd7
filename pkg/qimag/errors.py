#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
异常定义

所有库内异常都继承自 QimagError，命令行据此映射退出码。
"""


class QimagError(Exception):
    """qimag 基础异常"""
    exit_code = 2

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DimensionError(QimagError):
    """矩阵维度不合法"""
    pass


class DomainError(QimagError):
    """参数超出定义域"""
    pass


class StateValidationError(QimagError):
    """密度矩阵校验失败"""

    def __init__(self, message, field=None, diagnostics=None):
        super().__init__(message, field=field)
        self.diagnostics = diagnostics


class FrameError(QimagError):
    """基或酉变换不合法"""
    pass


class NumericalError(QimagError):
    """数值误差超出容忍范围"""
    pass


class OptimizerError(QimagError):
    """优化器失败：目标函数非有限或未收敛"""
    exit_code = 3

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ThresholdError(QimagError):
    """区间两端没有变号"""
    pass


class BoundConstantError(QimagError):
    """重新计算的互补界常数偏离预期"""
    exit_code = 1
