import os
import sys
import json
import copy


def get_default_data_dir():
    if getattr(sys, 'frozen', False):
        # 打包环境，放到可执行文件同级 user-data 目录
        exe_dir = os.path.dirname(sys.executable)
        return os.path.join(exe_dir, 'user-data')
    else:
        # 源码环境
        return os.path.abspath(os.path.join(os.path.dirname(__file__), "../../user-data"))

DATA_DIR = get_default_data_dir()
DEFAULT_SETTINGS = {
    "log_path": os.path.join(DATA_DIR, "qimag.log"),
    "language": "zh",  # 命令行提示语言
    "workers": None,  # None 表示按 CPU 核数
    "verdict_margin": 1e-7,  # NAQI 判定的严格不等式余量
    "csv_significant_digits": 9,
    "optimizer": {
        "grid_points_per_dim": 24,
        "refine_iterations": 200,
        "refine_tolerance": 1e-9,
        "multistart_count": 8,
        "seed": 0,
        "inner_multistart_count": 2,
        "full_frame_orbit": True,
        "analytic_l1_inner": True
    }
}
SETTINGS_FILE = os.path.join(DATA_DIR, "settings.json")


def resolve_settings_path(path=None):
    return path or os.environ.get('QIMAG_SETTINGS') or SETTINGS_FILE


def load_settings(path=None):
    settings_file = resolve_settings_path(path)
    defaults = copy.deepcopy(DEFAULT_SETTINGS)
    if os.path.exists(settings_file):
        try:
            with open(settings_file, "r", encoding="utf-8") as f:
                data = json.load(f)
            for k, v in defaults.items():
                if k not in data:
                    data[k] = v
                elif isinstance(v, dict) and isinstance(data[k], dict):
                    merged = dict(v)
                    merged.update(data[k])
                    data[k] = merged
            return data
        except Exception:
            return defaults
    else:
        return defaults


def save_settings(settings, path=None):
    settings_file = resolve_settings_path(path)
    # 确保目录存在
    data_dir = os.path.dirname(settings_file)
    if data_dir and not os.path.exists(data_dir):
        os.makedirs(data_dir, exist_ok=True)
    with open(settings_file, "w", encoding="utf-8") as f:
        json.dump(settings, f, indent=2, ensure_ascii=False)
