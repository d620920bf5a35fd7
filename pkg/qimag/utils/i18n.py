# i18n.py
# 命令行提示的简单多语言支持

_language = 'zh'

_texts = {
    'zh': {
        'cli_description': '量子虚性度量、互补关系与非局域虚性优势(NAQI)计算',
        'input_error': '输入错误',
        'optimizer_error': '优化器错误',
        'not_certified': '优化未完全收敛，结果未经认证',
        'unexpected_error': '未处理的异常',
        'field': '字段',
        'written_to': '结果已写入',
        'selftest_pass': '通过',
        'selftest_fail': '失败',
        'selftest_summary': '自检完成: {passed}/{total} 项通过',
        'help_measure': '虚性度量: l1 或 r(相对熵)',
        'help_family': '内置态族',
        'help_p': '态族参数 p',
        'help_state_json': '密度矩阵 JSON 文件路径',
        'help_output': '输出文件路径(默认标准输出)',
        'help_format': '输出格式',
        'help_grid': '每维网格点数',
        'help_refine_iters': '单纯形细化最大迭代次数',
        'help_refine_tol': '单纯形细化收敛容差',
        'help_starts': '外层细化起点数',
        'help_inner_starts': '内层细化起点数',
        'help_seed': '随机种子',
        'help_workers': '并行进程数(默认读取 NAQI_WORKERS 或 CPU 核数)',
        'help_restricted_frames': '只在两参数的 MUB 族上搜索(关闭相位 χ)',
        'help_numeric_inner': 'l1 内层也使用数值优化',
        'help_verdict_margin': 'NAQI 判定余量',
        'help_degrees': '角度以度为单位输入',
        'help_settings': '设置文件路径',
        'help_log_file': '日志文件路径',
        'help_verbose': '在标准错误输出中打印日志',
        'help_lang': '提示语言',
        'help_bloch': 'Bloch 矢量 n_x n_y n_z',
        'help_basis': 'Pauli 本征基',
        'help_mub': 'MUB 三元组角度 θ1 φ1',
        'help_values': '显式参数列表',
        'help_range': '参数范围: 起点 终点 点数',
        'help_bracket': '二分区间',
        'help_tol': '参数精度',
        'help_variant': '三比特态族: alpha-beta 或 theta',
        'help_n_alpha': 'α 网格点数',
        'help_n_beta': 'β 网格点数',
        'help_n_theta': 'θ 网格点数',
        'help_reverse_roles': '交换测量方与虚性方',
        'help_debug_margin': '调试用：注入判定余量',
        'help_write_settings': '把当前设置写入设置文件',
        'help_chi': 'M1 第二个基矢上的相位 χ',
        'help_theta_range': 'θ 扫描范围(默认 0 到 2π)',
    },
    'en': {
        'cli_description': 'Quantum imaginarity measures, complementarity and nonlocal advantage of quantum imaginarity (NAQI)',
        'input_error': 'Input error',
        'optimizer_error': 'Optimizer error',
        'not_certified': 'optimisation did not fully converge, result not certified',
        'unexpected_error': 'Unhandled exception',
        'field': 'field',
        'written_to': 'Result written to',
        'selftest_pass': 'PASS',
        'selftest_fail': 'FAIL',
        'selftest_summary': 'Selftest finished: {passed}/{total} checks passed',
        'help_measure': 'imaginarity measure: l1 or r (relative entropy)',
        'help_family': 'built-in state family',
        'help_p': 'family parameter p',
        'help_state_json': 'path to a density-matrix JSON file',
        'help_output': 'output path (default stdout)',
        'help_format': 'output format',
        'help_grid': 'grid points per dimension',
        'help_refine_iters': 'maximum simplex refinement iterations',
        'help_refine_tol': 'simplex refinement tolerance',
        'help_starts': 'outer refinement starts',
        'help_inner_starts': 'inner refinement starts',
        'help_seed': 'random seed',
        'help_workers': 'worker processes (default NAQI_WORKERS or CPU count)',
        'help_restricted_frames': 'search only the two-parameter MUB family (no phase chi)',
        'help_numeric_inner': 'use numeric inner maximisation for l1 as well',
        'help_verdict_margin': 'NAQI verdict margin',
        'help_degrees': 'angles are given in degrees',
        'help_settings': 'settings file path',
        'help_log_file': 'log file path',
        'help_verbose': 'also log to stderr',
        'help_lang': 'message language',
        'help_bloch': 'Bloch vector n_x n_y n_z',
        'help_basis': 'Pauli eigenbasis',
        'help_mub': 'MUB triple angles theta1 phi1',
        'help_values': 'explicit parameter list',
        'help_range': 'parameter range: start stop count',
        'help_bracket': 'bisection bracket',
        'help_tol': 'parameter tolerance',
        'help_variant': 'three-qubit family: alpha-beta or theta',
        'help_n_alpha': 'alpha grid points',
        'help_n_beta': 'beta grid points',
        'help_n_theta': 'theta grid points',
        'help_reverse_roles': 'swap measuring and imaginarity parties',
        'help_debug_margin': 'debug: inject a verdict margin',
        'help_write_settings': 'write the effective settings to the settings file',
        'help_chi': 'phase chi on the second vector of M1',
        'help_theta_range': 'theta range (default 0 to 2 pi)',
    }
}


def set_language(lang):
    global _language
    if lang in _texts:
        _language = lang


def get_language():
    return _language


def get_text(key):
    return _texts.get(_language, _texts['zh']).get(key, key)
