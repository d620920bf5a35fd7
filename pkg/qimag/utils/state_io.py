#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
密度矩阵 JSON 读写与结果文件输出
"""

import csv
import io
import json
import logging
import math
import sys

import numpy as np

from ..errors import DimensionError, QimagError, StateValidationError
from ..models.qmat import ALLOWED_DIMS, DensityMatrix, validate_matrix

logger = logging.getLogger(__name__)

STATE_KEYS = ('dim', 're', 'im')
SCAN_HEADER = ('param', 'N', 'witness', 'verdict')
ALPHA_BETA_HEADER = ('alpha', 'beta', 'N_AB', 'N_BC', 'N_CA', 'count_exceeding')
THETA_HEADER = ('theta', 'N_AB', 'N_BC', 'N_CA', 'count_exceeding')


def _matrix_field(data, key, dim):
    rows = data[key]
    if not isinstance(rows, list) or len(rows) != dim:
        raise DimensionError(f'"{key}" 必须是 {dim} 行的数组', field=key)
    out = np.empty((dim, dim), dtype=float)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise DimensionError(f'"{key}" 第 {i} 行必须有 {dim} 个元素', field=key)
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise StateValidationError(f'"{key}"[{i}][{j}] 不是有限实数: {x!r}', field=key)
            out[i, j] = x
    return out


def parse_state(data):
    """{"dim": d, "re": [[...]], "im": [[...]]} -> DensityMatrix"""
    if not isinstance(data, dict):
        raise StateValidationError('状态文件顶层必须是 JSON 对象', field='state')
    unknown = sorted(set(data) - set(STATE_KEYS))
    if unknown:
        raise StateValidationError(f'未知字段: {unknown}', field=unknown[0])
    missing = [k for k in STATE_KEYS if k not in data]
    if missing:
        raise StateValidationError(f'缺少字段: {missing}', field=missing[0])
    dim = data['dim']
    if isinstance(dim, bool) or not isinstance(dim, int) or dim not in ALLOWED_DIMS:
        raise DimensionError(f'dim 必须是 {ALLOWED_DIMS} 之一, 实际 {dim!r}', field='dim')
    array = _matrix_field(data, 're', dim) + 1j * _matrix_field(data, 'im', dim)
    diagnostics = validate_matrix(array)
    if not diagnostics.passed:
        raise StateValidationError(f'state: {diagnostics.describe()}', field='state',
                                   diagnostics=diagnostics)
    return DensityMatrix(array)


def read_state_json(path):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise QimagError(f'无法读取状态文件 {path}: {e}', field='state_json')
    except json.JSONDecodeError as e:
        raise StateValidationError(f'状态文件不是合法 JSON: {e}', field='state_json')
    rho = parse_state(data)
    logger.info(f'读取状态文件 {path}: dim = {rho.dim}')
    return rho


def state_to_dict(rho):
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    return {'dim': int(m.shape[0]), 're': m.real.tolist(), 'im': m.imag.tolist()}


def write_state_json(rho, path):
    """浮点数按 repr 写出，可无损读回"""
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(state_to_dict(rho), f, indent=2)


def format_number(value, digits=9):
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f'{float(value):.{digits}g}'


def csv_text(header, rows, digits=9):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(row[k], digits) for k in header])
    return buffer.getvalue()


def scan_csv(records, digits=9):
    return csv_text(SCAN_HEADER, [r.to_row() for r in records], digits)


def exclusion_csv(records, digits=9):
    header = ALPHA_BETA_HEADER if records and 'alpha' in records[0].params else THETA_HEADER
    return csv_text(header, [r.to_row() for r in records], digits)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def json_text(payload):
    return json.dumps(_jsonable(payload), indent=2, ensure_ascii=False)


def scan_json(records):
    return json_text([dict(r.to_row(), result=r.result.to_dict() if r.result else None) for r in records])


def exclusion_json(records):
    return json_text([dict(r.to_row(), results=[x.to_dict() for x in r.results]) for r in records])


def write_text(text, path=None, stream=None):
    """path 为空时写到 stream(默认标准输出)"""
    if path:
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        logger.info(f'结果已写入 {path}')
        return
    (stream or sys.stdout).write(text if text.endswith('\n') else text + '\n')
