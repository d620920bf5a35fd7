import json
import logging

import pytest

from qimag import LOGGER_NAME
from qimag.errors import DomainError
from qimag.utils import i18n
from qimag.utils.log_manager import init_logging
from qimag.utils.settings_manager import DEFAULT_SETTINGS, load_settings, save_settings
from qimag.utils.worker_pool import WorkerPool, resolve_worker_count


def test_load_settings_defaults(tmp_path):
    ret_ = load_settings(str(tmp_path / 'missing.json'))
    assert ret_ == DEFAULT_SETTINGS
    ret_['optimizer']['seed'] = 5
    assert DEFAULT_SETTINGS['optimizer']['seed'] == 0


def test_load_settings_merges(tmp_path):
    path = tmp_path / 'settings.json'
    path.write_text(json.dumps({'language': 'en', 'optimizer': {'grid_points_per_dim': 10}}), encoding='utf-8')
    ret_ = load_settings(str(path))
    assert ret_['language'] == 'en'
    assert ret_['optimizer']['grid_points_per_dim'] == 10
    assert ret_['optimizer']['multistart_count'] == 8
    assert ret_['verdict_margin'] == 1e-7


def test_load_settings_env_and_corrupt(tmp_path, monkeypatch):
    path = tmp_path / 'broken.json'
    path.write_text('{not json', encoding='utf-8')
    monkeypatch.setenv('QIMAG_SETTINGS', str(path))
    assert load_settings() == DEFAULT_SETTINGS


def test_save_settings_round_trip(tmp_path):
    path = str(tmp_path / 'sub' / 'settings.json')
    settings = load_settings(path)
    settings['workers'] = 3
    save_settings(settings, path)
    assert load_settings(path)['workers'] == 3


def test_resolve_worker_count(monkeypatch):
    monkeypatch.delenv('NAQI_WORKERS', raising=False)
    assert resolve_worker_count(3) == 3
    assert resolve_worker_count() >= 1
    assert resolve_worker_count(None, {'workers': 2}) == 2
    monkeypatch.setenv('NAQI_WORKERS', '4')
    assert resolve_worker_count() == 4
    assert resolve_worker_count(1) == 1
    monkeypatch.setenv('NAQI_WORKERS', 'many')
    with pytest.raises(DomainError):
        resolve_worker_count()
    with pytest.raises(DomainError):
        resolve_worker_count(0)


def test_worker_pool_map():
    with WorkerPool(1) as pool:
        assert pool.map(abs, [-1, 2, -3]) == [1, 2, 3]
    with WorkerPool(2) as pool:
        assert pool.map(abs, [-1, 2, -3]) == [1, 2, 3]


def test_worker_pool_stops_on_error():
    pool = WorkerPool(2)
    with pytest.raises(RuntimeError):
        with pool:
            raise RuntimeError('boom')
    assert pool._pool is None


def test_init_logging(tmp_path):
    path = tmp_path / 'logs' / 'qimag.log'
    logger = init_logging(str(path), command='bound')
    init_logging(str(path), level=logging.DEBUG, command='naqi')
    assert len(logger.handlers) == 1
    logging.getLogger(LOGGER_NAME + '.models.naqi').info('N_l1 = 3')
    for handler in logger.handlers:
        handler.flush()
    text = path.read_text(encoding='utf-8')
    assert '=' * 50 in text
    assert 'N_l1 = 3' in text
    assert logger.level == logging.DEBUG


def test_i18n():
    try:
        i18n.set_language('en')
        assert i18n.get_text('input_error') == 'Input error'
        i18n.set_language('fr')
        assert i18n.get_language() == 'en'
        assert i18n.get_text('no_such_key') == 'no_such_key'
    finally:
        i18n.set_language('zh')
    assert i18n.get_text('input_error') == '输入错误'
